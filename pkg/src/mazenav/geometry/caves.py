"""Caves cut from the boundary or an equidistant curve by a chord.

A chord between two points of a closed curve splits the plane region it
closes off into two Jordan domains; one is the other united with the
obstacle.  The smaller one is the cave.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .boundary import Obstacle
from .frames import singular_parts

TWO_PI = 2.0 * math.pi


class InvalidCaveError(ValueError):
    """The chord between the cave corners crosses into N(d)."""


def polygon_area(poly) -> float:
    """Signed shoelace area (positive for counterclockwise)."""
    P = np.asarray(poly, dtype=float)
    x, y = P[:, 0], P[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def winding_number(poly, p, on_edge_tol: float = 1e-9):
    """Winding number of a closed polygon about ``p``.

    Returns ``None`` when ``p`` is within ``on_edge_tol`` of an edge.
    """
    P = np.asarray(poly, dtype=float) - np.asarray(p, dtype=float)
    Q = np.roll(P, -1, axis=0)
    E = Q - P
    ee = np.einsum("ij,ij->i", E, E)
    t = np.clip(-np.einsum("ij,ij->i", P, E) / np.where(ee > 0, ee, 1.0), 0.0, 1.0)
    near = P + t[:, None] * E
    if np.min(np.hypot(near[:, 0], near[:, 1])) <= on_edge_tol:
        return None
    cross = P[:, 0] * Q[:, 1] - P[:, 1] * Q[:, 0]
    up = (P[:, 1] <= 0) & (Q[:, 1] > 0) & (cross > 0)
    down = (P[:, 1] > 0) & (Q[:, 1] <= 0) & (cross < 0)
    return int(np.sum(up) - np.sum(down))


def point_in_polygon(poly, p) -> bool:
    """Closed-region membership via nonzero winding; edge points count as inside."""
    w = winding_number(poly, p)
    return True if w is None else w != 0


def _cyclic_between(x, a, b, L, tol):
    """True if ``x`` lies strictly inside the forward arc from ``a`` to ``b``."""
    span = (b - a) % L
    off = (x - a) % L
    return tol < off < span - tol


def arc_abscissae(obstacle: Obstacle, s_from: float, s_to: float, d: float = 0.0,
                  forward: bool = True, tol: float = 1e-4) -> np.ndarray:
    """Abscissae from ``s_from`` to ``s_to`` walking forward or backward.

    Interior samples come from the polygonization of C(d); the result is
    unwrapped (monotone) and includes both ends.
    """
    L = obstacle.perimeter
    grid = obstacle.polygon_abscissae(d, tol)
    if forward:
        span = (s_to - s_from) % L
        off = (grid - s_from) % L
        inner = np.sort(off[(off > 1e-12) & (off < span - 1e-12)])
        return s_from + np.concatenate([[0.0], inner, [span]])
    span = (s_from - s_to) % L
    off = (s_from - grid) % L
    inner = np.sort(off[(off > 1e-12) & (off < span - 1e-12)])
    return s_from - np.concatenate([[0.0], inner, [span]])


def curve_points(obstacle: Obstacle, s, d: float = 0.0) -> np.ndarray:
    pos, _, N, _ = obstacle.eval_many(np.asarray(s, dtype=float))
    return pos - d * N


@dataclass(frozen=True)
class Cave:
    """The smaller Jordan domain cut off by a chord.

    Attributes
    ----------
    s_minus, s_plus : float
        Corner abscissae (boundary parametrization).
    d : float
        Level of the equidistant curve carrying the corners.
    direction : int
        +1 if the enclosed arc runs forward from ``s_minus`` to ``s_plus``.
    polygon : ndarray
        Closed outline: enclosed arc followed by the bridge back.
    degree : int
        Singular parts strictly inside the enclosed arc.
    contains_target : bool
    """

    s_minus: float
    s_plus: float
    d: float
    direction: int
    polygon: np.ndarray = field(repr=False)
    area: float
    degree: int
    contains_target: bool

    def contains(self, p) -> bool:
        return point_in_polygon(self.polygon, p)


def _degree(obstacle, target, d, a, b, direction):
    L = obstacle.perimeter
    tol = 1e-7 * L
    if direction < 0:
        a, b = b, a
    n = 0
    for part in singular_parts(obstacle, target, d):
        if _cyclic_between(part.start, a, b, L, tol) and _cyclic_between(part.end, a, b, L, tol):
            n += 1
    return n


def _check_chord(obstacle: Obstacle, s_minus: float, s_plus: float, d: float,
                 n: int = 257) -> None:
    a = curve_points(obstacle, np.array([s_minus]), d)[0]
    b = curve_points(obstacle, np.array([s_plus]), d)[0]
    slack = 1e-7 * obstacle.perimeter
    for f in np.linspace(0.0, 1.0, n)[1:-1]:
        dist, _, inside = obstacle.nearest(a + f * (b - a))
        if inside or dist < d - slack:
            raise InvalidCaveError(f"chord enters N({d}) at fraction {f:.3f}")


def cave_between(obstacle: Obstacle, target, s_minus: float, s_plus: float,
                 d: float = 0.0, bridge=None, tol: float = 1e-4) -> Cave:
    """Cave with corners at abscissae ``s_minus``, ``s_plus`` of C(d).

    Parameters
    ----------
    bridge : (k, 2) array_like, optional
        Polyline from the point at ``s_plus`` back to the point at
        ``s_minus``.  Defaults to the straight chord.

    Raises
    ------
    InvalidCaveError
        If the straight chord passes closer than ``d`` to the obstacle.
    """
    if bridge is None:
        _check_chord(obstacle, s_minus, s_plus, d)
    loops = []
    for forward in (True, False):
        s = arc_abscissae(obstacle, s_minus, s_plus, d, forward, tol)
        arc = curve_points(obstacle, s, d)
        poly = arc if bridge is None else np.vstack([arc, np.asarray(bridge, float)[1:-1]])
        loops.append((abs(polygon_area(poly)), forward, poly))
    area, forward, poly = min(loops, key=lambda z: z[0])
    direction = 1 if forward else -1
    return Cave(float(s_minus), float(s_plus), float(d), direction, poly, area,
                _degree(obstacle, target, d, s_minus, s_plus, direction),
                point_in_polygon(poly, target))


def excursion_cave(obstacle: Obstacle, target, r_exit, r_entry) -> Cave:
    """Cave closed by a free-space excursion between two curve contacts.

    The outline is the boundary arc between the projections of the exit
    point ``r_exit`` and the re-entry point ``r_entry`` followed by the
    broken line projection(entry) -> r_entry -> r_exit -> projection(exit).
    ``direction`` is the walk direction from the exit projection to the
    entry projection along the enclosed arc.
    """
    _, s_exit = obstacle.distance_query(r_exit)
    _, s_entry = obstacle.distance_query(r_entry)
    p_exit = curve_points(obstacle, [s_exit])[0]
    p_entry = curve_points(obstacle, [s_entry])[0]
    bridge = np.array([p_entry, r_entry, r_exit, p_exit])
    return cave_between(obstacle, target, s_exit, s_entry, 0.0, bridge)


# ---------------------------------------------------------------------------
# locked locations
# ---------------------------------------------------------------------------

@dataclass
class RadialCaves:
    """All simple caves of N(d) whose corners share a ray from the target.

    Built once per (obstacle, target, d) by casting rays from the target
    through a polygonized C(d); each gap between consecutive crossings
    that lies outside N(d) and does not start at the target is a chord.
    Membership queries then cost O(n) per point.
    """

    obstacle: Obstacle
    target: np.ndarray
    d: float
    poly: np.ndarray
    chords: list  # (edge_a, frac_a, edge_b, frac_b, forward_is_smaller)
    hull: object = None

    def locked(self, r) -> bool:
        r = np.asarray(r, dtype=float)
        if self.hull is not None:
            from shapely.geometry import Point
            if self.hull.distance(Point(r)) > self.d:
                return False
        P = self.poly
        n = len(P)
        rel = P - r
        if np.min(np.hypot(rel[:, 0], rel[:, 1])) < 1e-12:
            return True
        ang = np.arctan2(rel[:, 1], rel[:, 0])
        inc = np.diff(np.append(ang, ang[0]))
        inc = (inc + np.pi) % TWO_PI - np.pi
        cum = np.concatenate([[0.0], np.cumsum(inc)])  # cum[k]: turning P0 -> Pk

        def at(edge, frac):
            return P[edge] + frac * (P[(edge + 1) % n] - P[edge])

        def angle(q):
            return math.atan2(q[1] - r[1], q[0] - r[0])

        def wrap(x):
            return (x + math.pi) % TWO_PI - math.pi

        for ka, fa, kb, fb, fwd in self.chords:
            if not fwd:
                ka, fa, kb, fb = kb, fb, ka, fa
            A = at(ka, fa)
            B = at(kb, fb)
            aA, aB = angle(A), angle(B)
            # forward arc A -> B along the polygon
            if ka == kb and fb >= fa:
                sweep = wrap(aB - aA)
            else:
                kb_eff = kb if kb > ka else kb + n
                first = (ka + 1) % n
                sweep = wrap(ang[first] - aA)
                lo, hi = ka + 1, kb_eff
                if hi > lo:
                    if hi <= n:
                        sweep += cum[hi] - cum[lo]
                    else:
                        sweep += (cum[n] - cum[lo]) + cum[hi - n]
                sweep += wrap(aB - ang[kb % n])
            sweep += wrap(aA - aB)  # chord back
            if abs(sweep) > math.pi:
                return True
        return False


def radial_caves(obstacle: Obstacle, target, d: float, n_rays: int = 4096,
                 tol: float = 1e-4) -> RadialCaves:
    """Enumerate chords of radial caves of N(d) for locked-location tests."""
    from shapely.geometry import Polygon

    P, _ = obstacle.offset_curve(d, tol)
    n = len(P)
    T = np.asarray(target, dtype=float)
    rel = P - T
    Q = np.roll(rel, -1, axis=0)
    E = Q - rel
    vert_dirs = np.arctan2(rel[:, 1], rel[:, 0])
    dirs = np.concatenate([np.linspace(-math.pi, math.pi, n_rays, endpoint=False),
                           vert_dirs + 1e-6, vert_dirs - 1e-6])
    total2 = 2.0 * polygon_area(P)
    pre = np.concatenate([[0.0], np.cumsum(rel[:, 0] * Q[:, 1] - rel[:, 1] * Q[:, 0])])
    chords = []
    seen = set()
    for th in dirs:
        e = np.array([math.cos(th), math.sin(th)])
        # solve rel + f E = t e
        den = E[:, 0] * e[1] - E[:, 1] * e[0]
        ok = np.abs(den) > 1e-15
        f = np.where(ok, -(rel[:, 0] * e[1] - rel[:, 1] * e[0]) / np.where(ok, den, 1.0), -1.0)
        hit = ok & (f >= 0.0) & (f < 1.0)
        idx = np.nonzero(hit)[0]
        if idx.size < 3:
            continue
        pts = rel[idx] + f[idx, None] * E[idx]
        t = pts @ e
        keep = t > 0
        idx, fr, t = idx[keep], f[idx][keep], t[keep]
        if idx.size < 3:
            continue
        order = np.argsort(t)
        idx, fr = idx[order], fr[order]
        for j in range(1, len(idx) - 1, 2):
            ka, fa, kb, fb = int(idx[j]), float(fr[j]), int(idx[j + 1]), float(fr[j + 1])
            key = (ka, kb)
            if key in seen:
                continue
            seen.add(key)
            A = rel[ka] + fa * E[ka]
            B = rel[kb] + fb * E[kb]
            # signed double area of forward loop A -> ... -> B -> A
            if ka == kb and fb >= fa:
                a2 = 0.0
            else:
                kb_eff = kb if kb > ka else kb + n
                first = rel[(ka + 1) % n]
                a2 = A[0] * first[1] - A[1] * first[0]
                lo, hi = ka + 1, kb_eff
                if hi <= n:
                    a2 += pre[hi] - pre[lo]
                else:
                    a2 += (pre[n] - pre[lo]) + pre[hi - n]
                last = rel[kb]
                a2 += last[0] * B[1] - last[1] * B[0]
            a2 += B[0] * A[1] - B[1] * A[0]
            other = total2 - a2
            chords.append((ka, fa, kb, fb, abs(a2) <= abs(other)))
    hull = Polygon(obstacle.offset_curve(0.0, tol)[0]).convex_hull
    return RadialCaves(obstacle, T, d, P, chords, hull)


def is_locked(obstacle: Obstacle, target, r, d_trig: float, caves: RadialCaves | None = None) -> bool:
    """True iff ``r`` lies in a simple cave of N(d_trig) with radially aligned corners."""
    if caves is None:
        caves = radial_caves(obstacle, target, d_trig)
    return caves.locked(r)
