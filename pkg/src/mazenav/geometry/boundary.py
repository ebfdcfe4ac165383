"""Piecewise line/arc obstacle boundaries.

The obstacle boundary is a closed, positively oriented chain of straight
segments and circular arcs joined with continuous tangents.  Everything
here is closed form: abscissa lookup, Frenet frame, curvature, offset
points and the exterior distance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ._kernels import nearest_kernel, pack_segments

TWO_PI = 2.0 * math.pi

CLOSE_TOL = 1e-9
TANGENT_TOL = 1e-6


class GeometryError(ValueError):
    """Invalid obstacle description."""


class PenetrationError(RuntimeError):
    """A query point lies inside (or on) the obstacle."""


class RegularMarginError(ValueError):
    """Offset distance outside the regular margin of the obstacle."""


def _wrap(a):
    return (a + math.pi) % TWO_PI - math.pi


def rot90(v):
    return np.array([-v[1], v[0]])


@dataclass(frozen=True)
class BoundarySegment:
    """A straight segment or a circular arc.

    Arcs are described by ``center``, ``radius``, the polar angles of the
    endpoints about the center (radians) and the sweep direction.  A
    counterclockwise arc is convex (interior on the center side), a
    clockwise arc is concave.
    """

    kind: str
    start: tuple
    end: tuple
    center: tuple | None = None
    radius: float | None = None
    from_angle: float | None = None
    to_angle: float | None = None
    ccw: bool = True

    @classmethod
    def line(cls, start, end) -> "BoundarySegment":
        seg = cls("line", (float(start[0]), float(start[1])), (float(end[0]), float(end[1])))
        if seg.length <= 0.0:
            raise GeometryError("degenerate line segment")
        return seg

    @classmethod
    def arc(cls, center, radius, from_angle, to_angle, ccw=True) -> "BoundarySegment":
        if radius <= 0:
            raise GeometryError("arc radius must be positive")
        cx, cy = float(center[0]), float(center[1])
        start = (cx + radius * math.cos(from_angle), cy + radius * math.sin(from_angle))
        end = (cx + radius * math.cos(to_angle), cy + radius * math.sin(to_angle))
        return cls("arc", start, end, (cx, cy), float(radius),
                   float(from_angle), float(to_angle), bool(ccw))

    @property
    def sweep(self) -> float:
        if self.kind != "arc":
            return 0.0
        if self.ccw:
            sw = (self.to_angle - self.from_angle) % TWO_PI
        else:
            sw = (self.from_angle - self.to_angle) % TWO_PI
        return TWO_PI if sw < 1e-15 else sw

    @property
    def length(self) -> float:
        if self.kind == "line":
            return math.hypot(self.end[0] - self.start[0], self.end[1] - self.start[1])
        return self.radius * self.sweep

    @property
    def curvature(self) -> float:
        if self.kind == "line":
            return 0.0
        return (1.0 if self.ccw else -1.0) / self.radius

    def point(self, u: float) -> np.ndarray:
        """Position at arc-length ``u`` from the segment start."""
        if self.kind == "line":
            a = np.asarray(self.start)
            b = np.asarray(self.end)
            return a + (b - a) * (u / self.length)
        ang = self._angle(u)
        return np.array([self.center[0] + self.radius * math.cos(ang),
                         self.center[1] + self.radius * math.sin(ang)])

    def tangent(self, u: float) -> np.ndarray:
        if self.kind == "line":
            a = np.asarray(self.start)
            b = np.asarray(self.end)
            return (b - a) / self.length
        ang = self._angle(u)
        if self.ccw:
            return np.array([-math.sin(ang), math.cos(ang)])
        return np.array([math.sin(ang), -math.cos(ang)])

    def _angle(self, u):
        if self.ccw:
            return self.from_angle + u / self.radius
        return self.from_angle - u / self.radius

    def to_dict(self) -> dict:
        if self.kind == "line":
            return {"kind": "line", "from": list(self.start), "to": list(self.end)}
        return {"kind": "arc", "center": list(self.center), "radius": self.radius,
                "from_angle": math.degrees(self.from_angle),
                "to_angle": math.degrees(self.to_angle), "ccw": self.ccw}

    @classmethod
    def from_dict(cls, d: dict) -> "BoundarySegment":
        kind = d.get("kind")
        if kind == "line":
            return cls.line(d["from"], d["to"])
        if kind == "arc":
            return cls.arc(d["center"], float(d["radius"]),
                           math.radians(float(d["from_angle"])),
                           math.radians(float(d["to_angle"])), bool(d.get("ccw", True)))
        raise GeometryError(f"unknown segment kind {kind!r}")


@dataclass(frozen=True)
class BoundaryPoint:
    s: float
    position: np.ndarray
    tangent: np.ndarray
    normal: np.ndarray
    curvature: float


@dataclass(frozen=True, eq=False)
class Obstacle:
    """Closed C1 obstacle boundary with cached arc-length table and margins.

    Use :func:`build_obstacle` to construct; it validates the chain and
    computes the concavity radius ``R_D`` and the regular margin
    ``d_star``.
    """

    segments: tuple
    perimeter: float
    d_star: float
    R_D: float
    _s0: np.ndarray = field(repr=False)
    _arrays: dict = field(repr=False)
    _tab: np.ndarray = field(repr=False, default=None)

    # -- abscissa helpers -------------------------------------------------
    def wrap_s(self, s):
        return np.mod(s, self.perimeter)

    def segment_index(self, s: float) -> int:
        s = float(s) % self.perimeter
        i = int(np.searchsorted(self._s0, s, side="right")) - 1
        return min(max(i, 0), len(self.segments) - 1)

    def joints(self) -> np.ndarray:
        """Abscissae of the segment joints."""
        return self._s0[:-1].copy()

    # -- frame evaluation --------------------------------------------------
    def boundary_eval(self, s: float) -> BoundaryPoint:
        """Exact position, Frenet frame and curvature at abscissa ``s``."""
        s = float(s) % self.perimeter
        i = self.segment_index(s)
        seg = self.segments[i]
        u = s - self._s0[i]
        T = seg.tangent(u)
        return BoundaryPoint(s, seg.point(u), T, rot90(T), seg.curvature)

    def eval_many(self, s):
        """Vectorized frame evaluation; returns ``(pos, T, N, kappa)``."""
        s = np.mod(np.asarray(s, dtype=float), self.perimeter)
        idx = np.clip(np.searchsorted(self._s0, s, side="right") - 1, 0, len(self.segments) - 1)
        a = self._arrays
        u = s - self._s0[idx]
        is_arc = a["is_arc"][idx]
        pos = np.empty(s.shape + (2,))
        T = np.empty(s.shape + (2,))
        # lines
        A = a["A"][idx]
        D = a["D"][idx]
        ln = a["len"][idx]
        frac = u / ln
        pos_l = A + D * frac[..., None]
        T_l = D / ln[..., None]
        # arcs
        sgn = a["sgn"][idx]
        r = a["r"][idx]
        ang = a["a0"][idx] + sgn * u / np.where(is_arc, r, 1.0)
        c, sn = np.cos(ang), np.sin(ang)
        pos_a = a["C"][idx] + r[..., None] * np.stack([c, sn], axis=-1)
        T_a = sgn[..., None] * np.stack([-sn, c], axis=-1)
        pos[:] = np.where(is_arc[..., None], pos_a, pos_l)
        T[:] = np.where(is_arc[..., None], T_a, T_l)
        N = np.stack([-T[..., 1], T[..., 0]], axis=-1)
        kappa = a["kappa"][idx]
        return pos, T, N, kappa

    def curvature_at(self, s: float) -> float:
        return self.segments[self.segment_index(s)].curvature

    # -- offsets -----------------------------------------------------------
    def offset_point(self, s: float, d: float):
        """Point of the equidistant curve C(d) at abscissa ``s`` and its curvature."""
        if d < 0 or d >= self.d_star:
            raise RegularMarginError(f"offset {d} outside [0, d_star={self.d_star})")
        bp = self.boundary_eval(s)
        k = bp.curvature
        return bp.position - d * bp.normal, k / (1.0 + k * d)

    def offset_curve(self, d: float = 0.0, tol: float = 1e-4):
        """Polygonized C(d) as ``(points, s_values)`` with chord error <= tol."""
        s_vals = self.polygon_abscissae(d, tol)
        pos, _, N, _ = self.eval_many(s_vals)
        return pos - d * N, s_vals

    def polygon_abscissae(self, d: float = 0.0, tol: float = 1e-4) -> np.ndarray:
        out = []
        for i, seg in enumerate(self.segments):
            s0 = self._s0[i]
            if seg.kind == "line":
                n = 1
            else:
                rad = seg.radius + (d if seg.ccw else -d)
                if rad <= 0:
                    raise RegularMarginError("offset collapses a concave arc")
                step = 2.0 * math.acos(max(-1.0, 1.0 - tol / rad))
                n = max(2, int(math.ceil(seg.sweep / step)))
            out.append(s0 + seg.length * np.arange(n) / n)
        return np.concatenate(out)

    # -- distance ----------------------------------------------------------
    def nearest(self, p):
        """Unsigned distance, abscissa of the closest point and an inside flag."""
        d, s, _, _, _, inside = nearest_kernel(self._tab, float(p[0]), float(p[1]))
        return d, s % self.perimeter, inside > 0.0

    def closest(self, px: float, py: float):
        """``(d, s, Tx, Ty, kappa, inside)`` for the closest boundary point."""
        d, s, tx, ty, k, inside = nearest_kernel(self._tab, px, py)
        return d, s % self.perimeter, tx, ty, k, inside > 0.0

    def distance_query(self, r):
        """Distance from an exterior point and the abscissa of its closest point.

        Raises :class:`PenetrationError` for points inside or on the obstacle.
        """
        d, s, inside = self.nearest(r)
        if inside or d <= 1e-12:
            raise PenetrationError(f"point {tuple(np.asarray(r, float))} is inside the obstacle")
        return d, s

    def contains(self, r) -> bool:
        d, _, inside = self.nearest(r)
        return inside or d <= 1e-12

    def bounding_box(self, pad: float = 0.0):
        pts, _ = self.offset_curve(0.0, tol=1e-3)
        lo = pts.min(axis=0) - pad
        hi = pts.max(axis=0) + pad
        return lo, hi


# ---------------------------------------------------------------------------
# construction and validation
# ---------------------------------------------------------------------------

def _angle_between(a, b):
    return math.atan2(a[0] * b[1] - a[1] * b[0], a[0] * b[0] + a[1] * b[1])


def _build_arrays(segments, s0):
    a = {}
    n = len(segments)
    a["is_arc"] = np.array([g.kind == "arc" for g in segments])
    a["A"] = np.array([g.start for g in segments], dtype=float)
    a["D"] = np.array([(g.end[0] - g.start[0], g.end[1] - g.start[1]) for g in segments])
    a["len"] = np.array([g.length for g in segments])
    a["C"] = np.array([g.center if g.kind == "arc" else (0.0, 0.0) for g in segments])
    a["r"] = np.array([g.radius if g.kind == "arc" else 1.0 for g in segments])
    a["a0"] = np.array([g.from_angle if g.kind == "arc" else 0.0 for g in segments])
    a["sgn"] = np.array([(1.0 if g.ccw else -1.0) if g.kind == "arc" else 0.0 for g in segments])
    a["kappa"] = np.array([g.curvature for g in segments])
    lines = [i for i in range(n) if segments[i].kind == "line"]
    arcs = [i for i in range(n) if segments[i].kind == "arc"]
    a["n_lines"] = len(lines)
    a["n_arcs"] = len(arcs)
    a["Lidx"] = np.array(lines, dtype=int)
    a["LA"] = a["A"][lines] if lines else np.zeros((0, 2))
    a["LD"] = a["D"][lines] if lines else np.zeros((0, 2))
    a["Llen"] = a["len"][lines] if lines else np.zeros(0)
    a["Llen2"] = a["Llen"] ** 2
    a["Ls0"] = s0[lines] if lines else np.zeros(0)
    a["Aidx"] = np.array(arcs, dtype=int)
    a["AC"] = a["C"][arcs] if arcs else np.zeros((0, 2))
    a["Ar"] = a["r"][arcs] if arcs else np.zeros(0)
    a["Aa0"] = a["a0"][arcs] if arcs else np.zeros(0)
    a["Asgn"] = a["sgn"][arcs] if arcs else np.zeros(0)
    a["Asweep"] = np.array([segments[i].sweep for i in arcs])
    a["AS"] = np.array([segments[i].start for i in arcs]) if arcs else np.zeros((0, 2))
    a["AE"] = np.array([segments[i].end for i in arcs]) if arcs else np.zeros((0, 2))
    a["As0"] = s0[arcs] if arcs else np.zeros(0)
    return a


def _segment_polyline(seg: BoundarySegment, n: int = 64) -> np.ndarray:
    if seg.kind == "line":
        return np.array([seg.start, seg.end], dtype=float)
    m = max(2, int(math.ceil(n * seg.sweep / TWO_PI)) + 1)
    return np.array([seg.point(u) for u in np.linspace(0.0, seg.length, m)])


def _intersections(g1: BoundarySegment, g2: BoundarySegment):
    """Intersection points of two segments (lines/arcs), analytic."""
    pts = []
    if g1.kind == "line" and g2.kind == "line":
        p = np.asarray(g1.start); r = np.asarray(g1.end) - p
        q = np.asarray(g2.start); s = np.asarray(g2.end) - q
        den = r[0] * s[1] - r[1] * s[0]
        if abs(den) < 1e-15:
            # parallel; check collinear overlap
            w = q - p
            if abs(w[0] * r[1] - w[1] * r[0]) < 1e-12:
                rr = r @ r
                t0 = (w @ r) / rr
                t1 = ((q + s - p) @ r) / rr
                lo, hi = max(0.0, min(t0, t1)), min(1.0, max(t0, t1))
                if hi >= lo:
                    pts += [p + lo * r, p + hi * r]
            return pts
        w = q - p
        t = (w[0] * s[1] - w[1] * s[0]) / den
        u = (w[0] * r[1] - w[1] * r[0]) / den
        if -1e-12 <= t <= 1 + 1e-12 and -1e-12 <= u <= 1 + 1e-12:
            pts.append(p + t * r)
        return pts
    if g1.kind == "arc" and g2.kind == "line":
        g1, g2 = g2, g1
    if g1.kind == "line" and g2.kind == "arc":
        p = np.asarray(g1.start); r = np.asarray(g1.end) - p
        c = np.asarray(g2.center)
        f = p - c
        A = r @ r
        B = 2 * (f @ r)
        Cc = f @ f - g2.radius ** 2
        disc = B * B - 4 * A * Cc
        if disc < 0:
            return pts
        sq = math.sqrt(disc)
        for t in {(-B - sq) / (2 * A), (-B + sq) / (2 * A)}:
            if -1e-12 <= t <= 1 + 1e-12:
                x = p + t * r
                if _on_arc(g2, x):
                    pts.append(x)
        return pts
    # arc-arc
    c1 = np.asarray(g1.center); c2 = np.asarray(g2.center)
    r1, r2 = g1.radius, g2.radius
    dvec = c2 - c1
    dist = math.hypot(*dvec)
    if dist < 1e-12:
        if abs(r1 - r2) < 1e-12:
            # same circle: overlapping arcs share endpoints or overlap
            for x in (np.asarray(g2.start), np.asarray(g2.end)):
                if _on_arc(g1, x):
                    pts.append(x)
            for x in (np.asarray(g1.start), np.asarray(g1.end)):
                if _on_arc(g2, x):
                    pts.append(x)
            # interior overlap
            mid = g2.point(0.5 * g2.length)
            if _on_arc(g1, mid):
                pts.append(mid)
        return pts
    if dist > r1 + r2 + 1e-12 or dist < abs(r1 - r2) - 1e-12:
        return pts
    a = (r1 * r1 - r2 * r2 + dist * dist) / (2 * dist)
    h = math.sqrt(max(r1 * r1 - a * a, 0.0))
    base = c1 + a * dvec / dist
    perp = np.array([-dvec[1], dvec[0]]) / dist
    for x in (base + h * perp, base - h * perp):
        if _on_arc(g1, x) and _on_arc(g2, x):
            pts.append(x)
    return pts


def _on_arc(g: BoundarySegment, x, tol=1e-10) -> bool:
    ang = math.atan2(x[1] - g.center[1], x[0] - g.center[0])
    if g.ccw:
        delta = (ang - g.from_angle) % TWO_PI
    else:
        delta = (g.from_angle - ang) % TWO_PI
    if delta <= g.sweep + tol / g.radius:
        return True
    return delta >= TWO_PI - tol / g.radius


def _regular_margin(segments, s0, perimeter, arrays, R_D) -> float:
    """Largest exterior ball radius touching every boundary point.

    For a boundary point p with outward normal n, an exterior ball of radius
    t tangent at p is free of the boundary iff for every boundary point q
    with n.(q - p) > 0 one has t <= |q - p|^2 / (2 n.(q - p)).  The regular
    margin is the infimum of that bound over all pairs.
    """
    n_samples = max(1200, 24 * len(segments))
    s_p = _dense_abscissae(segments, s0, perimeter, n_samples)
    pos, T, N, _ = _eval(arrays, s0, perimeter, segments, s_p)
    outward = -N

    def bound_pairs(P, n, Q):
        w = Q[None, :, :] - P[:, None, :]
        num = np.einsum("ijk,ijk->ij", w, w)
        den = 2.0 * np.einsum("ik,ijk->ij", n, w)
        with np.errstate(divide="ignore", invalid="ignore"):
            val = np.where(den > 1e-12 * np.sqrt(num + 1e-300), num / den, np.inf)
        return val

    best = np.inf
    best_pair = None
    chunk = 256
    for i0 in range(0, len(s_p), chunk):
        val = bound_pairs(pos[i0:i0 + chunk], outward[i0:i0 + chunk], pos)
        k = np.unravel_index(np.argmin(val), val.shape)
        if val[k] < best:
            best = float(val[k])
            best_pair = (s_p[i0 + k[0]], s_p[k[1]])
    if best_pair is None or not np.isfinite(best):
        return R_D  # convex: every exterior ball fits
    best = min(best, _refine_margin(arrays, s0, perimeter, segments, best_pair, best))
    return min(best, R_D)


def _refine_margin(arrays, s0, perimeter, segments, pair, start_val):
    from scipy.optimize import minimize

    def f(x):
        pos, T, N, _ = _eval(arrays, s0, perimeter, segments, np.array([x[0], x[1]]))
        w = pos[1] - pos[0]
        den = 2.0 * float((-N[0]) @ w)
        # nearby pairs only reproduce the local curvature radius (in R_D)
        if den <= 1e-12 or float(w @ w) < (1e-4 * perimeter) ** 2:
            return start_val * 10 + 1.0
        return float(w @ w) / den

    res = minimize(f, np.array(pair), method="Nelder-Mead",
                   options={"xatol": 1e-9, "fatol": 1e-12, "maxiter": 2000})
    return min(start_val, float(res.fun))


def _dense_abscissae(segments, s0, perimeter, n):
    out = []
    for i, g in enumerate(segments):
        m = max(16, int(math.ceil(n * g.length / perimeter)))
        out.append(s0[i] + g.length * (np.arange(m) + 0.5) / m)
    return np.concatenate(out)


def _eval(arrays, s0, perimeter, segments, s):
    tmp = Obstacle(tuple(segments), perimeter, math.inf, math.inf, s0, arrays,
                   pack_segments(segments, s0))
    return tmp.eval_many(s)


def build_obstacle(segments: Sequence[BoundarySegment]) -> Obstacle:
    """Validate a closed C1 line/arc chain and build an :class:`Obstacle`.

    Raises :class:`GeometryError` for an open chain, a tangent
    discontinuity, a self-intersection or a clockwise orientation.
    """
    segments = tuple(segments)
    if not segments:
        raise GeometryError("an obstacle needs at least one segment")
    n = len(segments)
    for i, g in enumerate(segments):
        if g.length <= 0:
            raise GeometryError(f"segment {i} has non-positive length")
        nxt = segments[(i + 1) % n]
        gap = math.hypot(g.end[0] - nxt.start[0], g.end[1] - nxt.start[1])
        if gap > CLOSE_TOL:
            raise GeometryError(f"open chain: gap {gap:.3g} m after segment {i}")
        t_out = g.tangent(g.length)
        t_in = nxt.tangent(0.0)
        jump = abs(_angle_between(t_out, t_in))
        if jump > TANGENT_TOL:
            raise GeometryError(f"tangent discontinuity of {jump:.3g} rad after segment {i}")
    turning = sum(g.curvature * g.length for g in segments)
    if abs(turning - TWO_PI) > 1e-6:
        if abs(turning + TWO_PI) < 1e-6:
            raise GeometryError("boundary is clockwise; the interior must lie to the left")
        raise GeometryError(f"total turning {turning:.6f} is not 2*pi")
    _check_simple(segments)
    lengths = np.array([g.length for g in segments])
    s0 = np.concatenate([[0.0], np.cumsum(lengths)])
    perimeter = float(s0[-1])
    arrays = _build_arrays(segments, s0)
    concave = [g.radius for g in segments if g.kind == "arc" and not g.ccw]
    R_D = min(concave) if concave else math.inf
    d_star = _regular_margin(segments, s0, perimeter, arrays, R_D)
    return Obstacle(segments, perimeter, d_star, R_D, s0, arrays, pack_segments(segments, s0))


def _check_simple(segments):
    n = len(segments)
    if n == 1:
        return
    for i in range(n):
        for j in range(i + 1, n):
            pts = _intersections(segments[i], segments[j])
            if not pts:
                continue
            adjacent = (j == i + 1) or (i == 0 and j == n - 1)
            if not adjacent:
                raise GeometryError(f"self-intersection between segments {i} and {j}")
            # adjacent pieces may only share their joint
            if j == i + 1:
                joint = np.asarray(segments[i].end)
            else:
                joint = np.asarray(segments[j].end)
            shared = [p for p in pts if math.hypot(*(np.asarray(p) - joint)) > 1e-7]
            if n == 2:
                other = np.asarray(segments[i].start)
                shared = [p for p in shared if math.hypot(*(np.asarray(p) - other)) > 1e-7]
            if shared:
                raise GeometryError(f"self-intersection between segments {i} and {j}")
