"""Unicycle with constant speed and bounded turning rate."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

STRAIGHT_TOL = 1e-12


class ControlSaturationError(ValueError):
    """Turning rate outside the admissible range."""


@dataclass(frozen=True)
class Pose:
    x: float
    y: float
    theta: float

    @property
    def position(self) -> np.ndarray:
        return np.array([self.x, self.y])

    @property
    def heading(self) -> np.ndarray:
        return np.array([math.cos(self.theta), math.sin(self.theta)])


@dataclass(frozen=True)
class VehicleParams:
    """Cruise speed ``v`` and turning-rate bound ``u_max``."""

    v: float = 1.0
    u_max: float = 1.0

    def __post_init__(self):
        if not (self.v > 0 and self.u_max > 0):
            raise ValueError("speed and turning-rate bound must be positive")

    @property
    def R(self) -> float:
        return self.v / self.u_max


def min_turn_radius(params: VehicleParams) -> float:
    """Minimal turning radius v / u_max."""
    return params.v / params.u_max


def _sinc(x):
    return 1.0 - x * x / 6.0 if abs(x) < 1e-4 else math.sin(x) / x


def integrate_step(p: Pose, u: float, dt: float, params: VehicleParams) -> Pose:
    """Advance the pose over ``dt`` with constant turning rate ``u``.

    The update is the exact arc (or straight segment) traced by the
    kinematics, written in a form that stays accurate as ``u -> 0``.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if abs(u) > params.u_max + 1e-12:
        raise ControlSaturationError(f"|u| = {abs(u)} exceeds u_max = {params.u_max}")
    v = params.v
    if abs(u) < STRAIGHT_TOL:
        return Pose(p.x + v * dt * math.cos(p.theta), p.y + v * dt * math.sin(p.theta), p.theta)
    half = 0.5 * u * dt
    chord = v * dt * _sinc(half)
    mid = p.theta + half
    return Pose(p.x + chord * math.cos(mid), p.y + chord * math.sin(mid), p.theta + u * dt)
