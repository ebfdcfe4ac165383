"""Target-relative quantities along the boundary and its equidistant curves.

For a boundary point rho(s) with Frenet frame (T, N), the target seen from
that point has frame coordinates ``lam = (target - rho).T`` and
``zeta = (target - rho).N``.  On the equidistant curve C(d) the tangent is
unchanged and the point moves by ``-d N``, so ``lam`` is unchanged and
``zeta`` becomes ``zeta + d``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .boundary import Obstacle

PLATEAU_TOL = 1e-9
MERGE_TOL = 1e-9


class ResolutionError(ValueError):
    """Curve samples too coarse to track a continuous angle."""


class DegenerateFrameError(ValueError):
    """The target lies on the curve."""


@dataclass(frozen=True)
class TargetFrame:
    s: float
    lam: float
    zeta: float
    psi: float
    phi: float


def target_frame(obstacle: Obstacle, s: float, target, d: float = 0.0) -> TargetFrame:
    """Target coordinates in the Frenet frame at abscissa ``s`` of C(d).

    ``psi`` is the polar angle of (lam, zeta); ``phi`` is the polar angle
    of the curve point seen from the target.
    """
    bp = obstacle.boundary_eval(s)
    tgt = np.asarray(target, dtype=float)
    p = bp.position - d * bp.normal
    w = tgt - p
    lam = float(w @ bp.tangent)
    zeta = float(w @ bp.normal)
    if math.hypot(lam, zeta) < 1e-12:
        raise DegenerateFrameError("target lies on the curve")
    return TargetFrame(bp.s, lam, zeta, math.atan2(zeta, lam), math.atan2(-w[1], -w[0]))


def frame_arrays(obstacle: Obstacle, s, target, d: float = 0.0):
    """Vectorized ``(lam, zeta, psi, phi)`` at abscissae ``s`` of C(d)."""
    pos, T, N, _ = obstacle.eval_many(s)
    w = np.asarray(target, dtype=float) - (pos - d * N)
    lam = np.einsum("...k,...k->...", w, T)
    zeta = np.einsum("...k,...k->...", w, N)
    return lam, zeta, np.arctan2(zeta, lam), np.arctan2(-w[..., 1], -w[..., 0])


def zeta_values(obstacle: Obstacle, s, target):
    """zeta along the boundary itself (d = 0)."""
    return frame_arrays(obstacle, s, target)[1]


# ---------------------------------------------------------------------------
# turning angles
# ---------------------------------------------------------------------------

def continuous_turning(angles) -> float:
    """Sum of wrapped increments of a sampled angle sequence."""
    a = np.asarray(angles, dtype=float)
    da = np.diff(a)
    da = (da + np.pi) % (2 * np.pi) - np.pi
    if da.size and np.max(np.abs(da)) >= np.pi / 2:
        raise ResolutionError("adjacent polar-angle jump of pi/2 or more")
    return float(np.sum(da))


def winding_about(curve, p, closed: bool = True) -> float:
    """Total turning of the vector from the curve point to ``p``.

    Parameters
    ----------
    curve : (n, 2) array_like
        Sampled curve.  Closed curves are closed automatically.
    p : array_like
        Reference point, off the curve.

    Returns
    -------
    float
        Radians; ``2*pi*k`` for a closed curve winding ``k`` times about p.
    """
    c = np.asarray(curve, dtype=float)
    if closed:
        c = np.vstack([c, c[:1]])
    w = np.asarray(p, dtype=float) - c
    if np.min(np.hypot(w[:, 0], w[:, 1])) < 1e-12:
        raise DegenerateFrameError("point lies on the curve")
    return continuous_turning(np.arctan2(w[:, 1], w[:, 0]))


def _refined_abscissae(obstacle: Obstacle, d: float, target, max_step: float = 0.2):
    """Abscissae dense enough that the target direction turns slowly."""
    s = obstacle.polygon_abscissae(d, tol=1e-5)
    pos, _, N, _ = obstacle.eval_many(s)
    pts = pos - d * N
    h = np.hypot(*(np.asarray(target, float) - pts).T)
    L = obstacle.perimeter
    ds = np.diff(np.append(s, L))
    # chord / distance bounds the polar-angle increment seen from the target
    gap = np.hypot(*np.diff(np.vstack([pts, pts[:1]]), axis=0).T)
    k = np.maximum(1, np.ceil(gap * (1.0 + abs(d) * np.abs(obstacle.eval_many(s)[3]))
                               / (max_step * np.maximum(h, 1e-9))).astype(int))
    out = [s[i] + ds[i] * np.arange(k[i]) / k[i] for i in range(len(s))]
    return np.concatenate(out)


def r_turning(obstacle: Obstacle, target, d: float = 0.0) -> float:
    """Turning of the frame vector (lam, zeta) over one positive lap of C(d)."""
    s = _refined_abscissae(obstacle, d, target)
    s = np.append(s, obstacle.perimeter)
    _, _, psi, _ = frame_arrays(obstacle, s, target, d)
    return continuous_turning(psi)


def tangent_turning(obstacle: Obstacle, s0: float = 0.0, s1: float | None = None) -> float:
    """Integral of curvature from ``s0`` to ``s1`` (one lap by default)."""
    if s1 is None:
        s1 = s0 + obstacle.perimeter
    total = 0.0
    joints = obstacle._s0
    L = obstacle.perimeter
    a = s0
    while a < s1 - 1e-15:
        i = obstacle.segment_index(a)
        seg_end = math.floor(a / L) * L + joints[i + 1]
        if seg_end <= a + 1e-15:
            seg_end += L if i == len(obstacle.segments) - 1 else 0.0
        b = min(s1, seg_end)
        total += obstacle.segments[i].curvature * (b - a)
        a = b
    return total


# ---------------------------------------------------------------------------
# level sets of zeta
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LevelComponent:
    """Connected component of {s : zeta(s) = c}.

    ``start`` lies in [0, L); ``end`` may exceed L when the component wraps.
    """

    start: float
    end: float

    @property
    def is_point(self) -> bool:
        return self.end - self.start <= 1e-9


@dataclass(frozen=True)
class SingularPart:
    """A level component across which zeta strictly changes sign.

    ``sign`` is the sign of zeta just after the part (increasing s).
    """

    start: float
    end: float
    sign: int

    @property
    def mid(self) -> float:
        return 0.5 * (self.start + self.end)


def _segment_level_hits(obstacle: Obstacle, target, c: float):
    """Raw intervals (s_a, s_b) of {zeta = c} per segment, closed form."""
    tgt = np.asarray(target, dtype=float)
    out = []
    for i, g in enumerate(obstacle.segments):
        s0 = obstacle._s0[i]
        if g.kind == "line":
            A = np.asarray(g.start)
            T = (np.asarray(g.end) - A) / g.length
            N = np.array([-T[1], T[0]])
            z = float((tgt - A) @ N)
            if abs(z - c) <= PLATEAU_TOL:
                out.append((s0, s0 + g.length))
            continue
        cen = np.asarray(g.center)
        w = tgt - cen
        D = float(np.hypot(*w))
        aT = math.atan2(w[1], w[0])
        # ccw: zeta = r - D cos(a - aT); cw: zeta = D cos(a - aT) - r
        if D < 1e-15:
            z = g.radius if g.ccw else -g.radius
            if abs(z - c) <= PLATEAU_TOL:
                out.append((s0, s0 + g.length))
            continue
        k = (g.radius - c) / D if g.ccw else (g.radius + c) / D
        if abs(k) > 1.0 + 1e-15:
            continue
        k = max(-1.0, min(1.0, k))
        da = math.acos(k)
        sgn = 1.0 if g.ccw else -1.0
        for a in {aT + da, aT - da}:
            delta = (sgn * (a - g.from_angle)) % (2 * math.pi)
            if delta > 2 * math.pi - 1e-12:
                delta = 0.0
            if delta <= g.sweep + 1e-12:
                u = min(delta * g.radius, g.length)
                out.append((s0 + u, s0 + u))
    return out


def level_components(obstacle: Obstacle, target, c: float) -> list:
    """Connected components of {s : zeta(s) = c}, sorted by start."""
    L = obstacle.perimeter
    raw = sorted(_segment_level_hits(obstacle, target, c))
    if not raw:
        return []
    tol = MERGE_TOL * max(1.0, L)
    merged = [list(raw[0])]
    for a, b in raw[1:]:
        if a <= merged[-1][1] + tol:
            merged[-1][1] = max(merged[-1][1], b)
        else:
            merged.append([a, b])
    if len(merged) > 1 and merged[0][0] <= tol and merged[-1][1] >= L - tol:
        first = merged.pop(0)
        merged[-1][1] = L + first[1]
    if len(merged) == 1 and merged[0][0] <= tol and merged[0][1] >= L - tol:
        return [LevelComponent(0.0, L)]
    return [LevelComponent(a % L if a >= L else a, (a % L if a >= L else a) + (b - a))
            for a, b in merged]


def singular_parts(obstacle: Obstacle, target, d: float = 0.0) -> list:
    """Singular parts of the equidistant curve C(d) with respect to the target.

    A singular part is a component of {zeta_C(d) = 0} (isolated point or
    a plateau on a line collinear with the target) across which zeta
    strictly changes sign.

    Returns
    -------
    list of SingularPart
        Sorted by start abscissa (boundary parametrization).
    """
    comps = level_components(obstacle, target, -d)
    n = len(comps)
    if n < 2:
        return []
    L = obstacle.perimeter
    mids = []
    for j in range(n):
        a = comps[j].end
        b = comps[(j + 1) % n].start
        if b <= a:
            b += L
        mids.append(0.5 * (a + b))
    signs = np.sign(zeta_values(obstacle, np.array(mids), target) + d).astype(int)
    parts = []
    for j in range(n):
        before = signs[j - 1]
        after = signs[j]
        if before != after and before != 0 and after != 0:
            parts.append(SingularPart(comps[j].start, comps[j].end, int(after)))
    return parts


# ---------------------------------------------------------------------------
# domain statistics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DomainStats:
    """Counts entering the switching bounds.

    P : components of {kappa < 0}
    Q : components of {zeta = 0}
    F : max component count of {zeta = c} over |c| <= d_sharp
    K : singular parts of the boundary
    """

    P: int
    Q: int
    F: int
    K: int
    d_sharp: float

    @property
    def N_s(self) -> int:
        m = (self.P + 1) * (self.Q + 1)
        return m + self.F * (m + 1)


def concave_components(obstacle: Obstacle) -> int:
    neg = [g.curvature < 0 for g in obstacle.segments]
    n = len(neg)
    if all(neg):
        return 1
    return sum(1 for i in range(n) if neg[i] and not neg[i - 1])


def critical_levels(obstacle: Obstacle, target) -> np.ndarray:
    """Values of zeta at which the level-set topology may change."""
    tgt = np.asarray(target, dtype=float)
    vals = []
    for i, g in enumerate(obstacle.segments):
        s0 = obstacle._s0[i]
        vals += list(zeta_values(obstacle, np.array([s0, s0 + 0.5 * g.length]), tgt))
        if g.kind == "arc":
            D = float(np.hypot(*(tgt - np.asarray(g.center))))
            if g.ccw:
                vals += [g.radius - D, g.radius + D]
            else:
                vals += [D - g.radius, -D - g.radius]
    return np.unique(np.asarray(vals))


def domain_stats(obstacle: Obstacle, target, d_sharp: float, d: float = 0.0) -> DomainStats:
    """Compute P, Q, F and K for an obstacle and target.

    ``Q`` and ``K`` refer to the equidistant curve C(d); the default
    ``d = 0`` is the boundary itself.  ``F`` is evaluated at every critical
    level in [-d_sharp, d_sharp] and at the midpoints between consecutive
    ones, where the count is locally constant.

    Raises
    ------
    ValueError
        If ``d_sharp`` is not positive or reaches the target's distance to
        the obstacle.
    """
    dist_t, _ = obstacle.distance_query(target)
    if not 0.0 < d_sharp < dist_t:
        raise ValueError(f"d_sharp = {d_sharp} must lie in (0, dist(target) = {dist_t:.6g})")
    P = concave_components(obstacle)
    Q = len(level_components(obstacle, target, -d))
    K = len(singular_parts(obstacle, target, d))
    crit = critical_levels(obstacle, target)
    crit = crit[(crit >= -d_sharp) & (crit <= d_sharp)]
    levels = np.unique(np.concatenate([[-d_sharp, 0.0, d_sharp], crit]))
    levels = np.concatenate([levels, 0.5 * (levels[1:] + levels[:-1])])
    F = max(len(level_components(obstacle, target, c)) for c in levels)
    return DomainStats(P, Q, F, K, float(d_sharp))


def default_d_sharp(obstacle: Obstacle, target, d_trig: float) -> float:
    """Midpoint between d_trig and the target's distance to the obstacle."""
    dist_t, _ = obstacle.distance_query(target)
    return 0.5 * (d_trig + dist_t)
