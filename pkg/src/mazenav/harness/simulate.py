"""Closed-loop runs with event-located switching."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..controller import (ControllerState, Event, GeomContext, control_step, guard_values,
                          sense, sigma_update)
from ..geometry.boundary import PenetrationError, RegularMarginError
from ..geometry.caves import excursion_cave
from ..vehicle import integrate_step
from .scenario import Scenario

ARRIVED = "target-reached"
TIMEOUT = "timeout"
PENETRATION = "penetration"

GUARD_TOL = 1e-12
BISECT_ITERS = 60


def default_dt(sc: Scenario) -> float:
    return sc.veh.R / (200.0 * sc.veh.v)


def default_t_max(sc: Scenario) -> float:
    return 50.0 * sc.obstacle.perimeter / sc.veh.v


def run_rng(master_seed: int, index: int = 0) -> np.random.Generator:
    """Independent stream for run ``index`` of a seeded batch."""
    ss = np.random.SeedSequence(int(master_seed), spawn_key=(int(index),))
    return np.random.Generator(np.random.PCG64(ss))


@dataclass
class RunRecord:
    """Sampled series, event log and outcome of one run.

    Row ``k`` holds the state at ``t[k]`` and the control ``u[k]``
    applied on ``[t[k], t[k+1])``.  ``d`` is NaN beyond the sensor range;
    ``d_true`` is the exact obstacle distance.
    """

    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    theta: np.ndarray
    u: np.ndarray
    d: np.ndarray
    beta: np.ndarray
    mode: list
    submode: list
    sigma: np.ndarray
    d_true: np.ndarray
    s: np.ndarray
    alpha: np.ndarray
    smec_d: np.ndarray
    events: list
    termination: str
    min_d: float
    arrival_time: float | None
    dt: float
    name: str = ""
    extras: dict = field(default_factory=dict)

    @property
    def n_switches(self) -> int:
        """Number of A -> B switches."""
        return sum(1 for e in self.events if e.kind == "A->B")

    @property
    def success(self) -> bool:
        return self.termination == ARRIVED

    def __len__(self) -> int:
        return len(self.t)


def _flipped(g0, g1) -> bool:
    for a, b in zip(g0, g1):
        if (a > GUARD_TOL and b <= 0.0) or (a < -GUARD_TOL and b >= 0.0):
            return True
    return False


def run_simulation(sc: Scenario, seed: int = 0, dt: float | None = None,
                   t_max: float | None = None, policy: str | None = None,
                   rng: np.random.Generator | None = None) -> RunRecord:
    """Simulate the closed loop until arrival, timeout or penetration.

    Parameters
    ----------
    sc : Scenario
    seed : int
        Master seed; the policy stream is ``run_rng(seed, 0)`` unless
        ``rng`` is given.
    dt, t_max : float, optional
        Step and horizon; default to ``R/(200 v)`` and ``50 L / v``.
    policy : str, optional
        Overrides the scenario's turn-direction policy.
    """
    if policy is not None:
        sc = sc.with_policy(policy)
    dt = default_dt(sc) if dt is None else float(dt)
    t_max = default_t_max(sc) if t_max is None else float(t_max)
    if rng is None:
        rng = run_rng(seed, 0)
    obs, veh, nav = sc.obstacle, sc.veh, sc.nav
    target = np.asarray(sc.target, dtype=float)

    def choose(cs: ControllerState, pos):
        first = cs.n_switches == 0
        cave = None
        if nav.policy == "deterministic" and not first and cs.r_exit is not None:
            try:
                cave = excursion_cave(obs, target, cs.r_exit, pos)
            except (PenetrationError, RegularMarginError):
                cave = None
        return sigma_update(nav.policy, cs.sigma, rng, nav.p, cave, first, nav.sigma0)

    ctx = GeomContext(obs, target, veh, nav, dt, choose)
    rows = {k: [] for k in ("t", "x", "y", "theta", "u", "d", "beta", "mode", "submode",
                            "sigma", "d_true", "s", "alpha", "smec_d")}
    events: list[Event] = []

    def push(t, pose, u, sr, cs):
        rows["t"].append(t)
        rows["x"].append(pose.x)
        rows["y"].append(pose.y)
        rows["theta"].append(pose.theta)
        rows["u"].append(u)
        rows["d"].append(sr.d if sr.d is not None else math.nan)
        rows["beta"].append(sr.beta)
        rows["mode"].append(cs.mode)
        rows["submode"].append(cs.submode)
        rows["sigma"].append(cs.sigma)
        rows["d_true"].append(sr.d_true)
        rows["s"].append(sr.s)
        rows["alpha"].append(sr.alpha)
        rows["smec_d"].append(cs.smec_d if cs.smec_d is not None else math.nan)

    pose = sc.start
    t = 0.0
    cs = ControllerState(sigma=nav.sigma0)
    termination = TIMEOUT
    arrival = None
    try:
        sr = sense(pose, obs, target, None, veh, nav)
    except PenetrationError:
        sr = None
        termination = PENETRATION
    if sr is not None:
        u, cs, ev = control_step(cs, sr, ctx, t, (pose.x, pose.y))
        events += ev
        push(t, pose, u, sr, cs)
        while True:
            if sr.h <= ctx.eps_T:
                termination = ARRIVED
                arrival = t
                events.append(Event(t, "arrival", cs.submode, "", pose.x, pose.y, cs.sigma))
                break
            if t >= t_max:
                termination = TIMEOUT
                events.append(Event(t, "timeout", cs.submode, "", pose.x, pose.y, cs.sigma))
                break
            h = min(dt, t_max - t)
            g0 = guard_values(cs, sr, ctx)
            nxt = integrate_step(pose, u, h, veh)
            try:
                sr1 = sense(nxt, obs, target, sr, veh, nav)
                hit = _flipped(g0, guard_values(cs, sr1, ctx))
            except PenetrationError:
                sr1 = None
                hit = True
            if hit:
                lo, hi = 0.0, 1.0
                for _ in range(BISECT_ITERS):
                    mid = 0.5 * (lo + hi)
                    if (hi - lo) * h < 1e-14:
                        break
                    p_mid = integrate_step(pose, u, mid * h, veh)
                    try:
                        s_mid = sense(p_mid, obs, target, sr, veh, nav)
                        flip = _flipped(g0, guard_values(cs, s_mid, ctx))
                    except PenetrationError:
                        flip = True
                    if flip:
                        hi = mid
                    else:
                        lo = mid
                h = hi * h
                nxt = integrate_step(pose, u, h, veh)
                try:
                    sr1 = sense(nxt, obs, target, sr, veh, nav)
                except PenetrationError:
                    t += h
                    pose = nxt
                    termination = PENETRATION
                    events.append(Event(t, "penetration", cs.submode, "", pose.x, pose.y, cs.sigma))
                    break
            t += h
            pose, sr = nxt, sr1
            u, cs, ev = control_step(cs, sr, ctx, t, (pose.x, pose.y))
            events += ev
            push(t, pose, u, sr, cs)
    arr = {k: np.asarray(v, dtype=float) for k, v in rows.items() if k not in ("mode", "submode", "sigma")}
    dtrue = arr["d_true"]
    return RunRecord(
        t=arr["t"], x=arr["x"], y=arr["y"], theta=arr["theta"], u=arr["u"], d=arr["d"],
        beta=arr["beta"], mode=rows["mode"], submode=rows["submode"],
        sigma=np.asarray(rows["sigma"], dtype=int), d_true=dtrue, s=arr["s"],
        alpha=arr["alpha"], smec_d=arr["smec_d"], events=events, termination=termination,
        min_d=float(np.min(dtrue)) if dtrue.size else math.nan, arrival_time=arrival,
        dt=dt, name=sc.name)
