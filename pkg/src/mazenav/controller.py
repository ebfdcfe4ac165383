"""Switching navigation law with sliding sub-modes and turn-direction policies.

Mode ``A`` pursues the target (u = u_max sgn beta, sliding on beta = 0).
Mode ``B`` is entered when the obstacle distance falls to ``d_trig``: an
initial turn away from the obstacle (IT), then sliding along an
equidistant curve (SMEC) alternating with straight pursuit (SMT), until
the distance rises back to ``d_trig``.

Sliding is realized with boundary-layer equivalent controls so that the
discrete automaton stays deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .geometry.boundary import Obstacle, PenetrationError
from .vehicle import Pose, VehicleParams

EPS_BETA = 1e-3
EPS_DDOT = 1e-9
LOOKAHEAD = 1e-6  # fraction of the perimeter

MODE_A = "A"
MODE_B = "B"

# sub-mode labels
TURN = "TURN"
SMT = "SMT"
IT = "IT"
SMEC = "SMEC"
BANG = "BANG"

POLICIES = ("basic", "randomized", "deterministic")


def _wrap(a: float) -> float:
    return (a + math.pi) % (2.0 * math.pi) - math.pi


@dataclass(frozen=True)
class NavParams:
    """Distance thresholds and the turn-direction policy.

    ``p`` is the probability of picking sigma = +1 under the randomized
    policy; ``sigma0`` is the initial (and, for ``basic``, permanent)
    direction.
    """

    d_safe: float
    d_trig: float
    d_range: float
    p: float = 0.5
    sigma0: int = 1
    policy: str = "basic"

    def __post_init__(self):
        if self.policy not in POLICIES:
            raise ValueError(f"unknown policy {self.policy!r}")
        if self.sigma0 not in (-1, 1):
            raise ValueError("sigma0 must be +1 or -1")
        if not (0.0 <= self.p <= 1.0):
            raise ValueError("p must lie in [0, 1]")


def tuning_checks(veh: VehicleParams, nav: NavParams, d_star: float, R_D: float) -> list:
    """Threshold inequalities as ``(name, holds, margin)`` triples."""
    R = veh.R
    rhs = min(d_star, nav.d_range, R_D - R)
    checks = [
        ("3R < d_safe + 2R", 3 * R < nav.d_safe + 2 * R, nav.d_safe - R),
        ("d_safe + 2R < d_trig", nav.d_safe + 2 * R < nav.d_trig, nav.d_trig - nav.d_safe - 2 * R),
        ("d_trig < min(d_star, d_range, R_D - R)", nav.d_trig < rhs, rhs - nav.d_trig),
        ("d_safe > R", nav.d_safe > R, nav.d_safe - R),
        ("3R < d_star", 3 * R < d_star, d_star - 3 * R),
        ("4R < R_D", 4 * R < R_D, R_D - 4 * R),
        ("d_range > 3R", nav.d_range > 3 * R, nav.d_range - 3 * R),
    ]
    return [(n, bool(ok), float(m)) for n, ok, m in checks]


@dataclass(frozen=True)
class SensorReading:
    """What the vehicle perceives at one instant.

    ``d`` is ``None`` beyond the sensor range.  ``d_dot_sign`` follows the
    sampled distance with a small deadband; ``d_dot`` is the exact rate
    from the current heading and is what the sliding logic uses.
    """

    d: float | None
    d_dot_sign: int
    beta: float
    h: float
    beta_raw: float
    s: float | None = None
    d_dot: float = 0.0
    alpha: float = 0.0
    kappa: float = 0.0
    d_true: float = math.inf


def sense(pose: Pose, obstacle: Obstacle, target, prev: SensorReading | None,
          veh: VehicleParams, nav: NavParams) -> SensorReading:
    """Sample distance, bearing and their rates at ``pose``.

    The bearing is unwrapped against ``prev`` so that full turns about
    the target accumulate.  Raises ``PenetrationError`` inside the obstacle.
    """
    px, py, th = pose.x, pose.y, pose.theta
    tx, ty = float(target[0]), float(target[1])
    dx, dy = tx - px, ty - py
    h = math.hypot(dx, dy)
    raw = _wrap(math.atan2(dy, dx) - th)
    beta = raw if prev is None else prev.beta + _wrap(raw - prev.beta_raw)
    d_true, s, tx, ty, kappa, inside = obstacle.closest(px, py)
    if inside or d_true <= 1e-12:
        raise PenetrationError(f"pose ({px}, {py}) is inside the obstacle")
    c, sn = math.cos(th), math.sin(th)
    # N = (-ty, tx) points into the obstacle; the outward unit normal is -N
    hn = -c * ty + sn * tx
    d_dot = -veh.v * hn
    alpha = math.atan2(hn, c * tx + sn * ty)
    d = d_true if d_true <= nav.d_range else None
    sign = 0
    if prev is not None and d is not None and prev.d is not None:
        diff = d - prev.d
        sign = 1 if diff > EPS_DDOT else (-1 if diff < -EPS_DDOT else 0)
    return SensorReading(d, sign, beta, h, raw, s, d_dot, alpha, kappa, d_true)


@dataclass(frozen=True)
class ControllerState:
    """Automaton state.

    ``submode`` is one of TURN/SMT in mode A and IT/SMEC/SMT/BANG in mode B.
    ``smec_d`` is the distance locked at the start of the current SMEC.
    ``r_exit`` is the position where mode B was last left (deterministic
    policy bookkeeping).
    """

    mode: str = MODE_A
    submode: str = TURN
    sigma: int = 1
    smec_d: float | None = None
    n_switches: int = 0
    r_exit: tuple | None = None


@dataclass(frozen=True)
class Event:
    t: float
    kind: str
    before: str
    after: str
    x: float
    y: float
    sigma: int


@dataclass
class GeomContext:
    """Geometry and parameters the control law needs besides the reading."""

    obstacle: Obstacle
    target: np.ndarray
    veh: VehicleParams
    nav: NavParams
    dt: float
    choose_sigma: Callable | None = None
    lookahead: float = field(init=False)
    eps_T: float = field(init=False)

    def __post_init__(self):
        self.lookahead = LOOKAHEAD * self.obstacle.perimeter
        self.eps_T = max(2.0 * self.veh.v * self.dt, 1e-4)

    def kappa_ahead(self, s: float, sigma: int) -> float:
        return self.obstacle.curvature_at(s + sigma * self.lookahead)


def pursuit_control(beta: float, h: float, ctx: GeomContext) -> float:
    """Discrete sign law on beta: saturated, deadbeat inside the thin layer."""
    v, um = ctx.veh.v, ctx.veh.u_max
    u = beta / ctx.dt + v * math.sin(beta) / max(h, 1e-12)
    return max(-um, min(um, u))


def smec_control(cs: ControllerState, sr: SensorReading, ctx: GeomContext) -> float:
    """Equivalent control on the equidistant curve plus a stabilizing correction."""
    v, um, R = ctx.veh.v, ctx.veh.u_max, ctx.veh.R
    k = sr.kappa
    d = sr.d_true
    u_eq = cs.sigma * v * k / (1.0 + k * d)
    w = 2.0 * v / R
    corr = cs.sigma * (w * w * (d - cs.smec_d) + 2.0 * w * sr.d_dot) / v
    return max(-um, min(um, u_eq + corr))


def _enter_post_it(cs, sr, ctx):
    """Sub-mode chosen once the initial turn has brought d_dot to zero."""
    s_beta = cs.sigma * sr.beta
    if s_beta > EPS_BETA:
        return replace(cs, submode=SMEC, smec_d=sr.d_true)
    if abs(sr.beta) <= EPS_BETA:
        if ctx.kappa_ahead(sr.s, cs.sigma) < 0:
            return replace(cs, submode=SMEC, smec_d=sr.d_true)
        return replace(cs, submode=SMT, smec_d=None)
    return cs


def control_step(cs: ControllerState, sr: SensorReading, ctx: GeomContext, t: float = 0.0,
                 pos=(math.nan, math.nan)):
    """One evaluation of the switching law.

    Returns
    -------
    u : float
    cs : ControllerState
        Updated state (the same object if nothing changed).
    events : list of Event
    """
    nav, um = ctx.nav, ctx.veh.u_max
    events = []

    def log(kind, before, after, state):
        events.append(Event(t, kind, before, after, float(pos[0]), float(pos[1]), state.sigma))

    if cs.mode == MODE_A:
        if sr.d is not None and sr.d <= nav.d_trig:
            sigma = cs.sigma
            if ctx.choose_sigma is not None:
                sigma = ctx.choose_sigma(cs, pos)
            new = replace(cs, mode=MODE_B, submode=IT, sigma=sigma, smec_d=None,
                          n_switches=cs.n_switches + 1)
            log("A->B", cs.submode, IT, new)
            # an IT of zero duration when already moving away in direction sigma
            if sr.d_dot >= 0 and sigma * math.cos(sr.alpha) > 0:
                nxt = _enter_post_it(new, sr, ctx)
                if nxt is not new:
                    log("submode", IT, nxt.submode, nxt)
                    new = nxt
            cs = new
        else:
            sub = SMT if abs(sr.beta) <= EPS_BETA else TURN
            if sub != cs.submode:
                log("submode", cs.submode, sub, cs)
                cs = replace(cs, submode=sub)
            return pursuit_control(sr.beta, sr.h, ctx), cs, events

    # mode B
    sub = cs.submode
    sigma = cs.sigma
    if sub == IT:
        if sr.d_dot >= 0 and sigma * math.cos(sr.alpha) > 0:
            if sr.d_true >= nav.d_trig and sigma * sr.beta <= EPS_BETA:
                new = replace(cs, mode=MODE_A, submode=TURN, smec_d=None,
                              r_exit=(float(pos[0]), float(pos[1])))
                log("B->A", IT, TURN, new)
                return pursuit_control(sr.beta, sr.h, ctx), new, events
            nxt = _enter_post_it(cs, sr, ctx)
            if nxt is not cs:
                log("submode", IT, nxt.submode, nxt)
                cs = nxt
    elif sub == SMEC:
        if sigma * sr.beta <= 0:
            nxt = replace(cs, submode=SMT if ctx.kappa_ahead(sr.s, sigma) > 0 else BANG,
                          smec_d=None)
            log("submode", SMEC, nxt.submode, nxt)
            cs = nxt
    elif sub in (SMT, BANG):
        if sr.d_true >= nav.d_trig and sr.d_dot >= 0:
            new = replace(cs, mode=MODE_A, submode=SMT if abs(sr.beta) <= EPS_BETA else TURN,
                          smec_d=None, r_exit=(float(pos[0]), float(pos[1])))
            log("B->A", sub, new.submode, new)
            return pursuit_control(sr.beta, sr.h, ctx), new, events
        if sub == SMT and sr.d_dot <= 0 and ctx.kappa_ahead(sr.s, sigma) < 0:
            nxt = replace(cs, submode=SMEC, smec_d=sr.d_true)
            log("submode", SMT, SMEC, nxt)
            cs = nxt
        elif sub == BANG:
            if abs(sr.beta) <= EPS_BETA:
                nxt = replace(cs, submode=SMT)
                log("submode", BANG, SMT, nxt)
                cs = nxt
            elif sr.d_dot <= 0 and sigma * sr.beta > 0:
                nxt = replace(cs, submode=SMEC, smec_d=sr.d_true)
                log("submode", BANG, SMEC, nxt)
                cs = nxt

    sub = cs.submode
    if sub == IT:
        if sr.d_dot < 0 or sigma * math.cos(sr.alpha) <= 0:
            u = -sigma * um
        else:
            # last phase: moving away, still turning until the target is ahead
            u = pursuit_control(sr.beta, sr.h, ctx)
    elif sub == SMEC:
        u = smec_control(cs, sr, ctx)
    elif sub == SMT:
        u = pursuit_control(sr.beta, sr.h, ctx)
    else:  # BANG: the raw switching law
        u = pursuit_control(sr.beta, sr.h, ctx) if sr.d_dot > 0 else -sigma * um
    return u, cs, events


def guard_values(cs: ControllerState, sr: SensorReading, ctx: GeomContext) -> tuple:
    """Continuous functions whose sign change marks a transition.

    The simulator bisects a step whenever one of them changes sign so
    that transitions happen on (numerically) exact crossing points.
    """
    nav = ctx.nav
    arrive = sr.h - ctx.eps_T
    if cs.mode == MODE_A:
        return (sr.d_true - nav.d_trig, arrive)
    sub = cs.submode
    if sub == IT:
        return (sr.d_dot, nav.d_trig - sr.d_true, arrive)
    if sub == SMEC:
        return (cs.sigma * sr.beta, arrive)
    if sub == SMT:
        return (nav.d_trig - sr.d_true, sr.d_dot, arrive)
    return (nav.d_trig - sr.d_true, sr.beta, sr.d_dot, arrive)


# ---------------------------------------------------------------------------
# turn-direction policies
# ---------------------------------------------------------------------------

def sigma_update(policy: str, current: int, rng: np.random.Generator | None = None,
                 p: float = 0.5, cave=None, first: bool = False, sigma0: int = 1) -> int:
    """Direction for a new avoidance maneuver.

    Parameters
    ----------
    policy : {"basic", "randomized", "deterministic"}
    current : int
        Direction in force before the switch.
    rng : numpy.random.Generator
        Required by the randomized policy; drawn once per call.
    cave : Cave, optional
        Cave closed by the preceding pursuit excursion (deterministic policy).
    first : bool
        True for the first switch of a run (deterministic policy uses ``sigma0``).
    """
    if policy == "basic":
        return current
    if policy == "randomized":
        return 1 if rng.random() < p else -1
    if policy == "deterministic":
        if first or cave is None:
            return sigma0
        return cave.direction if not cave.contains_target else -cave.direction
    raise ValueError(f"unknown policy {policy!r}")
