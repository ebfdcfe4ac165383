"""Symbolic path over a polygonal domain and the turning-angle identity.

The symbolic point moves straight at the target while nothing blocks it
and otherwise slides along the domain boundary, counting the bearing
``beta`` (angle from the direction of motion to the line of sight).  It
leaves the boundary once ``beta`` returns to zero and the straight move
to the target is unobstructed.  Corners are passed with an instantaneous
monotone sweep of ``beta`` between its one-sided values.

The second half of the module evaluates both sides of the turning
identity relating a vehicle path segment to the boundary arc swept by
its projection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry.boundary import Obstacle
from .geometry.caves import polygon_area, winding_number
from .geometry.frames import DomainStats

TWO_PI = 2.0 * math.pi
FOLLOW = "FOLLOW"
SMT = "SMT"
SP_MODE = "SP"

ARRIVED = "target-reached"
NON_TERMINATION = "non-termination"


class SymbolicPathError(ValueError):
    """Start or target inside the domain, or a degenerate domain."""


class PreconditionError(ValueError):
    """A path segment does not qualify for the turning identity."""


def _wrap(a):
    return (a + math.pi) % TWO_PI - math.pi


def _ang(v) -> float:
    return math.atan2(v[1], v[0])


def _cross(a, b):
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


# ---------------------------------------------------------------------------
# polygonal domain
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class PolygonDomain:
    """Simple polygon with counterclockwise vertices (interior on the left).

    Boundary positions are ``(k, f)``: edge ``k`` from vertex ``k`` to
    vertex ``k+1`` at fraction ``f``.
    """

    vertices: np.ndarray
    edges: np.ndarray = field(init=False, repr=False)
    lengths: np.ndarray = field(init=False, repr=False)
    units: np.ndarray = field(init=False, repr=False)
    cum: np.ndarray = field(init=False, repr=False)
    turns: np.ndarray = field(init=False, repr=False)
    perimeter: float = field(init=False)

    def __post_init__(self):
        V = np.asarray(self.vertices, dtype=float)
        keep = np.hypot(*(np.roll(V, -1, axis=0) - V).T) > 1e-12
        V = V[keep]
        if len(V) < 3:
            raise SymbolicPathError("domain needs at least 3 vertices")
        if polygon_area(V) < 0:
            V = V[::-1].copy()
        E = np.roll(V, -1, axis=0) - V
        lens = np.hypot(E[:, 0], E[:, 1])
        U = E / lens[:, None]
        Uprev = np.roll(U, 1, axis=0)
        # turn at vertex i from edge i-1 to edge i, positive to the left
        turns = np.arctan2(_cross(Uprev, U), np.einsum("ij,ij->i", Uprev, U))
        object.__setattr__(self, "vertices", V)
        object.__setattr__(self, "edges", E)
        object.__setattr__(self, "lengths", lens)
        object.__setattr__(self, "units", U)
        object.__setattr__(self, "cum", np.concatenate([[0.0], np.cumsum(lens)[:-1]]))
        object.__setattr__(self, "turns", turns)
        object.__setattr__(self, "perimeter", float(lens.sum()))

    @classmethod
    def from_obstacle(cls, obstacle: Obstacle, d: float = 0.0, tol: float = 1e-3) -> "PolygonDomain":
        """Inscribed polygon of the equidistant curve C(d)."""
        pts, _ = obstacle.offset_curve(d, tol)
        return cls(pts)

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def scale(self) -> float:
        return float(np.ptp(self.vertices, axis=0).max())

    def point(self, k: int, f: float) -> np.ndarray:
        return self.vertices[k] + f * self.edges[k]

    def abscissa(self, k: int, f: float) -> float:
        return float(self.cum[k] + f * self.lengths[k])

    def winding(self, p, tol: float | None = None):
        tol = 1e-10 * max(1.0, self.scale) if tol is None else tol
        return winding_number(self.vertices, p, on_edge_tol=tol)

    def interior(self, p) -> bool:
        """Strict interior membership (boundary points are not interior)."""
        w = self.winding(p)
        return w is not None and w != 0

    def boundary_between(self, s_from: float, s_to: float, sigma: int) -> np.ndarray:
        """Vertices strictly passed when walking from ``s_from`` to ``s_to`` in direction ``sigma``."""
        L = self.perimeter
        tol = 1e-12 * max(1.0, L)
        if sigma > 0:
            span = (s_to - s_from) % L
            off = (self.cum - s_from) % L
        else:
            span = (s_from - s_to) % L
            off = (s_from - self.cum) % L
        sel = (off > tol) & (off < span - tol)
        idx = np.nonzero(sel)[0]
        return self.vertices[idx[np.argsort(off[idx])]]

    def first_hit(self, p, target, t_min: float = 1e-9):
        """First point where the segment ``p -> target`` enters the interior.

        Returns ``None`` when the segment stays outside, else ``(t, k, f)``
        with ``t`` the fraction along the segment and ``(k, f)`` the
        boundary position.
        """
        p = np.asarray(p, dtype=float)
        dvec = np.asarray(target, dtype=float) - p
        A = self.vertices - p
        E = self.edges
        den = _cross(dvec[None, :], E)
        scale = float(np.hypot(*dvec)) * self.lengths
        ok = np.abs(den) > 1e-14 * scale
        safe = np.where(ok, den, 1.0)
        t = _cross(A, E) / safe
        f = _cross(A, dvec[None, :]) / safe
        eps = 1e-12
        hit = ok & (t > t_min) & (t <= 1.0 + eps) & (f >= -eps) & (f <= 1.0 + eps)
        cand = [(float(t[k]), int(k), float(np.clip(f[k], 0.0, 1.0))) for k in np.nonzero(hit)[0]]
        # vertices lying on the segment (covers edges collinear with it)
        dd = float(np.dot(dvec, dvec))
        tv = A @ dvec / dd
        off = np.abs(_cross(A, dvec[None, :])) / math.sqrt(dd)
        on = (off <= 1e-10 * max(1.0, self.scale)) & (tv > t_min) & (tv <= 1.0 + eps)
        cand += [(float(tv[k]), int(k), 0.0) for k in np.nonzero(on)[0]]
        if not cand:
            return None
        cand.sort()
        ts = [c[0] for c in cand] + [1.0]
        for i, c in enumerate(cand):
            t_next = ts[i + 1]
            if t_next - c[0] <= 1e-12:
                continue
            if self.interior(p + 0.5 * (c[0] + t_next) * dvec):
                return c
        return None


# ---------------------------------------------------------------------------
# symbolic path
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SymbolicState:
    """One sample of the symbolic point.

    ``phase`` is SMT or FOLLOW; ``sigma`` the follow direction (+1 walks
    the boundary counterclockwise); ``beta`` is unwrapped; ``visited``
    holds the boundary arcs ``(s_from, s_to, sigma)`` followed so far.
    """

    t: float
    position: tuple
    heading: float
    phase: str
    sigma: int
    beta: float
    visited: tuple = ()


@dataclass(frozen=True)
class CornerSweep:
    """Bearing sweep at a corner: ``band`` is floor(beta / pi) before and after."""

    vertex: int
    beta_in: float
    beta_out: float
    band_in: int
    band_out: int
    zeta_in: float
    zeta_out: float

    @property
    def singular(self) -> bool:
        return self.zeta_in * self.zeta_out <= 0.0


@dataclass
class SymbolicPath:
    """Trace of a symbolic path.

    ``arcs`` lists the boundary-follow intervals as ``(s_from, s_to,
    sigma, length)``; ``n_smt`` counts straight moves, the first and last
    included.  Column properties mirror the vehicle run record so the
    same CSV export applies.
    """

    states: list
    arcs: list
    sweeps: list
    n_smt: int
    termination: str
    first_turn: int
    cap: int
    smt_starts: list = field(default_factory=list)

    @property
    def success(self) -> bool:
        return self.termination == ARRIVED

    @property
    def t(self):
        return np.array([s.t for s in self.states])

    @property
    def x(self):
        return np.array([s.position[0] for s in self.states])

    @property
    def y(self):
        return np.array([s.position[1] for s in self.states])

    @property
    def theta(self):
        return np.array([s.heading for s in self.states])

    @property
    def u(self):
        return np.zeros(len(self.states))

    @property
    def d(self):
        return np.array([0.0 if s.phase == FOLLOW else math.nan for s in self.states])

    @property
    def beta(self):
        return np.array([s.beta for s in self.states])

    @property
    def mode(self):
        return [SP_MODE] * len(self.states)

    @property
    def submode(self):
        return [s.phase for s in self.states]

    @property
    def sigma(self):
        return np.array([s.sigma for s in self.states], dtype=int)

    def __len__(self) -> int:
        return len(self.states)


def smt_upper_bound(stats: DomainStats) -> int:
    """Most straight moves a single path can contain: (P+1)(Q+2)."""
    return (stats.P + 1) * (stats.Q + 2)


def non_termination_cap(stats: DomainStats) -> int:
    """Straight-move count beyond which a symbolic path is declared stuck."""
    return 2 * smt_upper_bound(stats) + stats.K


def _zeta(domain: PolygonDomain, k: int, p, target) -> float:
    # normal coordinate of the target in the frame of edge k
    u = domain.units[k]
    n = np.array([-u[1], u[0]])
    return float(np.dot(np.asarray(target) - p, n))


def _cave_direction(domain: PolygonDomain, s_star: float, s_dia: float, p_star, p_dia, target):
    """Direction from ``s_star`` along the cave arc, and whether the cave holds the target."""
    loops = {}
    for sg in (1, -1):
        mid = domain.boundary_between(s_star, s_dia, sg)
        loop = np.vstack([p_star, mid, p_dia]) if len(mid) else np.vstack([p_star, p_dia])
        loops[sg] = loop
    areas = {sg: abs(polygon_area(loop)) if len(loop) >= 3 else 0.0 for sg, loop in loops.items()}
    sg_in = 1 if areas[1] <= areas[-1] else -1
    w = winding_number(loops[sg_in], target)
    return sg_in, bool(w) if w is not None else True


def symbolic_path(domain, target, start, first_turn: int, stats: DomainStats | None = None,
                  cap: int | None = None, max_laps: float = 2.0) -> SymbolicPath:
    """Trace the symbolic path from ``start`` to ``target``.

    Parameters
    ----------
    domain : PolygonDomain or Obstacle
        An obstacle is polygonized at its boundary.
    first_turn : {+1, -1}
        Follow direction after the first straight move.  Later directions
        are chosen by the cave rule: leave the cave cut by the last straight
        move unless it contains the target.
    stats, cap
        The run stops with ``non-termination`` once the straight-move count
        exceeds ``cap`` (default ``non_termination_cap(stats)``, or 64 when
        no stats are given), or when one boundary interval runs more than
        ``max_laps`` times around the domain.

    Raises
    ------
    SymbolicPathError
        If the target or the start lies in the domain interior.
    """
    if isinstance(domain, Obstacle):
        domain = PolygonDomain.from_obstacle(domain)
    if first_turn not in (1, -1):
        raise ValueError("first_turn must be +1 or -1")
    tgt = np.asarray(target, dtype=float)
    p = np.asarray(start, dtype=float)
    if domain.winding(tgt) is None or domain.interior(tgt):
        raise SymbolicPathError("target lies in the domain")
    if domain.interior(p):
        raise SymbolicPathError("start lies inside the domain")
    if cap is None:
        cap = non_termination_cap(stats) if stats is not None else 64
    eps = 1e-7 * max(1.0, domain.scale)
    L = domain.perimeter

    states: list[SymbolicState] = []
    arcs: list = []
    sweeps: list = []
    starts: list = []
    visited: tuple = ()
    t = 0.0
    n_smt = 0
    sigma = first_turn
    leave = None  # (s, point) where the last straight move began on the boundary
    termination = NON_TERMINATION

    def push(pt, heading, phase, sg, beta):
        states.append(SymbolicState(t, (float(pt[0]), float(pt[1])), float(heading), phase,
                                    int(sg), float(beta), visited))

    while True:
        n_smt += 1
        starts.append((float(p[0]), float(p[1])))
        los = _ang(tgt - p)
        push(p, los, SMT, sigma, 0.0)
        if n_smt > cap:
            break
        hit = domain.first_hit(p, tgt)
        if hit is None:
            t += float(np.hypot(*(tgt - p)))
            p = tgt
            push(p, los, SMT, sigma, 0.0)
            termination = ARRIVED
            break
        th, k, f = hit
        q = p + th * (tgt - p)
        t += float(np.hypot(*(q - p)))
        p = q
        s_star = domain.abscissa(k, f)
        if leave is not None:
            sg_in, has_target = _cave_direction(domain, s_star, leave[0], p, leave[1], tgt)
            sigma = sg_in if has_target else -sg_in
        # start the follow on the edge leaving p in direction sigma
        if sigma > 0 and f >= 1.0 - 1e-12:
            k, f = (k + 1) % domain.n, 0.0
        elif sigma < 0 and f <= 1e-12:
            k, f = (k - 1) % domain.n, 1.0
        heading = _ang(sigma * domain.units[k])
        beta = _wrap(_ang(tgt - p) - heading)
        push(p, heading, FOLLOW, sigma, beta)
        s_begin = s_star
        walked = 0.0
        left = None
        while walked <= max_laps * L:
            if sigma > 0:
                v_next = (k + 1) % domain.n
                seg = (1.0 - f) * domain.lengths[k]
            else:
                v_next = k
                seg = f * domain.lengths[k]
            E = domain.vertices[v_next]
            beta += _wrap(_ang(tgt - E) - _ang(tgt - p))
            walked += seg
            t += seg
            p = E
            push(p, heading, FOLLOW, sigma, beta)
            if sigma > 0:
                k_next = v_next
                turn = domain.turns[v_next]
            else:
                k_next = (k - 1) % domain.n
                turn = -domain.turns[k]
            beta_out = beta - turn
            sweeps.append(CornerSweep(int(v_next), beta, beta_out,
                                      math.floor(beta / math.pi), math.floor(beta_out / math.pi),
                                      _zeta(domain, k, p, tgt), _zeta(domain, k_next, p, tgt)))
            lo, hi = min(beta, beta_out), max(beta, beta_out)
            if lo <= 1e-12 and hi >= -1e-12:
                u_los = (tgt - p) / np.hypot(*(tgt - p))
                w = domain.winding(p + eps * u_los)
                if w is None or w == 0:
                    left = p
                    break
            beta = beta_out
            k = k_next
            f = 0.0 if sigma > 0 else 1.0
            heading = _ang(sigma * domain.units[k])
            push(p, heading, FOLLOW, sigma, beta)
        if left is None:
            arcs.append((s_begin, domain.abscissa(k, f), sigma, walked))
            break
        s_leave = float(domain.cum[v_next])
        arcs.append((s_begin, s_leave, sigma, walked))
        visited = visited + ((s_begin, s_leave, sigma),)
        leave = (s_leave, p.copy())
    return SymbolicPath(states, arcs, sweeps, n_smt, termination, first_turn, cap, starts)


def single_segments(path: SymbolicPath, perimeter: float) -> list:
    """Split a trace into maximal runs whose follow arcs are pairwise disjoint.

    Returns a list of straight-move counts, one per run.  A run also ends
    when a single arc covers the whole boundary.
    """
    runs = []
    cur: list = []
    smt = 1
    for a in path.arcs:
        iv = _arc_interval(a, perimeter)
        if a[3] >= perimeter or any(_overlap(iv, b, perimeter) for b in cur):
            runs.append(smt)
            cur, smt = [], 1
        cur.append(iv)
        smt += 1
    runs.append(smt if path.success or not path.arcs else smt - 1)
    return runs


def _arc_interval(a, L):
    s0, s1, sg, _ = a
    if sg > 0:
        return (s0, s0 + (s1 - s0) % L)
    return (s1, s1 + (s0 - s1) % L)


def _overlap(a, b, L, tol=1e-9):
    for shift in (-L, 0.0, L):
        lo = max(a[0], b[0] + shift)
        hi = min(a[1], b[1] + shift)
        if hi - lo > tol * max(1.0, L):
            return True
    return False


# ---------------------------------------------------------------------------
# turning identity
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PathIdentityReport:
    """Both sides of the turning identity for one path segment (radians)."""

    lhs: float
    rhs: float
    residual: float
    boundary_turning: float
    sigma: int


def _turning(angles) -> float:
    a = np.asarray(angles, dtype=float)
    if a.size < 2:
        return 0.0
    return float(np.sum(_wrap(np.diff(a))))


def boundary_r_turning(obstacle: Obstacle, target, s_track, max_step: float = 0.05) -> float:
    """Turning of the target vector in the boundary frame along an unwrapped abscissa track.

    ``s_track`` is a sequence of unwrapped abscissae; consecutive values
    are joined monotonically, refined to steps of ``max_step``.
    """
    s_track = np.asarray(s_track, dtype=float)
    if s_track.size < 2:
        return 0.0
    pieces = [s_track[:1]]
    for a, b in zip(s_track[:-1], s_track[1:]):
        n = max(1, int(math.ceil(abs(b - a) / max_step)))
        pieces.append(np.linspace(a, b, n + 1)[1:])
    s = np.concatenate(pieces)
    # joints so that arcs and lines are never averaged across
    pos, T, _, _ = obstacle.eval_many(np.mod(s, obstacle.perimeter))
    tgt = np.asarray(target, dtype=float)
    ang = np.arctan2(tgt[1] - pos[:, 1], tgt[0] - pos[:, 0]) - np.arctan2(T[:, 1], T[:, 0])
    return _turning(ang)


def unwrap_abscissa(s, L: float) -> np.ndarray:
    """Remove the jumps of a cyclic abscissa track."""
    s = np.asarray(s, dtype=float)
    if s.size == 0:
        return s
    ds = np.diff(s)
    ds = (ds + 0.5 * L) % L - 0.5 * L
    return np.concatenate([[s[0]], s[0] + np.cumsum(ds)])


def _segments_cross(p1, p2, q1, q2) -> bool:
    d1 = p2 - p1
    d2 = q2 - q1
    den = d1[0] * d2[1] - d1[1] * d2[0]
    if abs(den) < 1e-15:
        return False
    w = q1 - p1
    a = (w[0] * d2[1] - w[1] * d2[0]) / den
    b = (w[0] * d1[1] - w[1] * d1[0]) / den
    return 1e-9 < a < 1 - 1e-9 and 1e-9 < b < 1 - 1e-9


def turning_identity_residual(obstacle: Obstacle, target, xy, theta, s=None,
                              check: bool = True) -> PathIdentityReport:
    """Evaluate both sides of the turning identity on a sampled path segment.

    Parameters
    ----------
    xy : (n, 2) array
        Path samples from r1 to r2, fine enough that the bearing changes
        by less than pi/2 between samples.
    theta : (n,) array
        Headings at the samples.
    s : (n,) array, optional
        Projections onto the boundary; computed when omitted.  Their
        unwrapped track defines the boundary arc and its direction.
    check : bool
        Verify that the normals at the ends meet the path only at its ends
        and that the loop does not encircle the target.

    Raises
    ------
    PreconditionError
        If ``check`` is on and the segment does not qualify.
    """
    xy = np.asarray(xy, dtype=float)
    theta = np.asarray(theta, dtype=float)
    tgt = np.asarray(target, dtype=float)
    if s is None:
        s = np.array([obstacle.nearest(p)[1] for p in xy])
    L = obstacle.perimeter
    su = unwrap_abscissa(s, L)
    sigma = 1 if su[-1] >= su[0] else -1
    bearing = np.arctan2(tgt[1] - xy[:, 1], tgt[0] - xy[:, 0]) - theta
    lhs = _turning(bearing)
    b1 = obstacle.boundary_eval(s[0])
    b2 = obstacle.boundary_eval(s[-1])
    r1, r2 = xy[0], xy[-1]
    if check and len(xy) > 2:
        for r, rho, skip in ((r1, b1.position, 0), (r2, b2.position, len(xy) - 2)):
            for i in range(len(xy) - 1):
                if i == skip:
                    continue
                if _segments_cross(r, rho, xy[i], xy[i + 1]):
                    raise PreconditionError("normal meets the path away from its end")
        s_dense = np.linspace(su[0], su[-1], max(2, int(abs(su[-1] - su[0]) / 0.05) + 2))
        arc = obstacle.eval_many(np.mod(s_dense, L))[0]
        loop = np.vstack([xy, b2.position, arc[::-1], b1.position])
        w = winding_number(loop, tgt)
        if w is None or w != 0:
            raise PreconditionError("loop encircles the target")
    bd = boundary_r_turning(obstacle, tgt, su)

    def subtended(r, rho):
        return _wrap(_ang(rho - tgt) - _ang(r - tgt))

    def rel(bp, th):
        return _wrap(th - _ang(sigma * bp.tangent))

    rhs = bd + subtended(r1, b1.position) - subtended(r2, b2.position) \
        + rel(b1, theta[0]) - rel(b2, theta[-1])
    return PathIdentityReport(lhs, rhs, abs(lhs - rhs), bd, sigma)
