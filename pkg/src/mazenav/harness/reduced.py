"""Vehicle motion in boundary coordinates (s, d, alpha).

Near the obstacle the pose is described by the abscissa ``s`` of the
closest boundary point, the distance ``d`` and the angle ``alpha`` from
the boundary tangent to the heading.  Then

    s' = v cos(alpha) / (1 + kappa(s) d),
    d' = -v sin(alpha),
    alpha' = -kappa(s) s' + u,

valid while ``0 < d < d_star``.  Integrating this system independently
of the Cartesian model cross-checks the distance and frame code.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..geometry.boundary import Obstacle, RegularMarginError
from ..vehicle import ControlSaturationError, Pose, VehicleParams, integrate_step
from .scenario import Scenario


@dataclass
class ReducedSeries:
    """Samples of a reduced-coordinate run; ``s`` is unwrapped."""

    t: np.ndarray
    s: np.ndarray
    d: np.ndarray
    alpha: np.ndarray
    u: np.ndarray
    x: np.ndarray
    y: np.ndarray
    theta: np.ndarray


def pose_from_reduced(obstacle: Obstacle, s: float, d: float, alpha: float) -> Pose:
    bp = obstacle.boundary_eval(s)
    p = bp.position - d * bp.normal
    th = math.atan2(bp.tangent[1], bp.tangent[0]) + alpha
    return Pose(float(p[0]), float(p[1]), th)


def reduced_from_pose(obstacle: Obstacle, pose: Pose):
    """``(s, d, alpha)`` of an exterior pose."""
    d, s, tx, ty, _, _ = obstacle.closest(pose.x, pose.y)
    alpha = math.remainder(pose.theta - math.atan2(ty, tx), 2.0 * math.pi)
    return s, d, alpha


def _policy(u_policy):
    if callable(u_policy):
        return u_policy
    c = float(u_policy)
    return lambda t, s, d, a: c


def _check_u(u, veh: VehicleParams):
    if abs(u) > veh.u_max + 1e-12:
        raise ControlSaturationError(f"|u| = {abs(u)} exceeds u_max = {veh.u_max}")


def run_reduced_dynamics(sc: Scenario, initial, u_policy, dt: float = 0.005,
                         t_max: float = 10.0) -> ReducedSeries:
    """Integrate the reduced system with classical RK4.

    Parameters
    ----------
    initial : (s, d, alpha)
    u_policy : float or callable ``(t, s, d, alpha) -> u``
        Evaluated once per step at its start and held over the step.

    Raises
    ------
    RegularMarginError
        When ``d`` leaves ``(0, d_star)``.
    """
    obs, veh = sc.obstacle, sc.veh
    v = veh.v
    law = _policy(u_policy)
    n = int(round(t_max / dt))

    def rhs(y, u):
        s, d, a = y
        k = obs.curvature_at(s)
        sd = v * math.cos(a) / (1.0 + k * d)
        return np.array([sd, -v * math.sin(a), -k * sd + u])

    y = np.array(initial, dtype=float)
    ts = np.empty(n + 1)
    Y = np.empty((n + 1, 3))
    U = np.zeros(n + 1)
    ts[0], Y[0] = 0.0, y
    for i in range(n):
        t = i * dt
        if not 0.0 < y[1] < obs.d_star:
            raise RegularMarginError(f"d = {y[1]} left (0, d_star) at t = {t}")
        u = float(law(t, *y))
        _check_u(u, veh)
        k1 = rhs(y, u)
        k2 = rhs(y + 0.5 * dt * k1, u)
        k3 = rhs(y + 0.5 * dt * k2, u)
        k4 = rhs(y + dt * k3, u)
        y = y + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        U[i] = u
        ts[i + 1], Y[i + 1] = (i + 1) * dt, y
    U[-1] = U[-2] if n else 0.0
    poses = [pose_from_reduced(obs, *row) for row in Y]
    return ReducedSeries(ts, Y[:, 0], Y[:, 1], Y[:, 2], U,
                         np.array([p.x for p in poses]), np.array([p.y for p in poses]),
                         np.array([p.theta for p in poses]))


def run_open_loop(sc: Scenario, start: Pose, u_policy, dt: float = 0.005,
                  t_max: float = 10.0):
    """Cartesian counterpart of :func:`run_reduced_dynamics` with the same control hold.

    Returns ``(t, x, y, theta)`` arrays.
    """
    obs, veh = sc.obstacle, sc.veh
    law = _policy(u_policy)
    n = int(round(t_max / dt))
    out = np.empty((n + 1, 3))
    pose = start
    out[0] = pose.x, pose.y, pose.theta
    for i in range(n):
        s, d, a = reduced_from_pose(obs, pose)
        u = float(law(i * dt, s, d, a))
        pose = integrate_step(pose, u, dt, veh)
        out[i + 1] = pose.x, pose.y, pose.theta
    return np.arange(n + 1) * dt, out[:, 0], out[:, 1], out[:, 2]
