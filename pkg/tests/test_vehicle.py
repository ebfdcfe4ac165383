import math

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from mazenav.vehicle import (ControlSaturationError, Pose, VehicleParams, integrate_step,
                             min_turn_radius)


def test_turn_radius():
    assert min_turn_radius(VehicleParams(2.0, 0.5)) == pytest.approx(4.0)
    assert VehicleParams(2.0, 0.5).R == pytest.approx(4.0)


def test_turn_radius_examples():
    assert min_turn_radius(VehicleParams(1.0, 2.0)) == pytest.approx(0.5)
    assert min_turn_radius(VehicleParams(2.0, 2.0)) == pytest.approx(1.0)


def test_one_step_full_circle():
    veh = VehicleParams(1.0, 2.0)
    p = integrate_step(Pose(0.3, -0.2, 0.7), 2.0, 2 * math.pi / 2.0, veh)
    assert p.x == pytest.approx(0.3, abs=1e-12) and p.y == pytest.approx(-0.2, abs=1e-12)
    assert math.remainder(p.theta - 0.7, 2 * math.pi) == pytest.approx(0.0, abs=1e-12)


def test_invalid_params():
    with pytest.raises(ValueError):
        VehicleParams(0.0, 1.0)
    with pytest.raises(ValueError):
        min_turn_radius(VehicleParams(0.0, 1.0))
    with pytest.raises(ValueError):
        VehicleParams(1.0, -1.0)


def test_straight_step():
    p = integrate_step(Pose(0, 0, math.pi / 4), 0.0, 2.0, VehicleParams())
    assert p.x == pytest.approx(math.sqrt(2)) and p.y == pytest.approx(math.sqrt(2))
    assert p.theta == pytest.approx(math.pi / 4)


def test_full_circle_returns_home():
    veh = VehicleParams(1.0, 1.0)
    p = Pose(0.0, 0.0, 0.0)
    n = 1000
    for _ in range(n):
        p = integrate_step(p, 1.0, 2 * math.pi / n, veh)
    assert abs(p.x) < 1e-12 and abs(p.y) < 1e-12
    assert p.theta == pytest.approx(2 * math.pi)


def test_quarter_turn_lands_on_circle():
    p = integrate_step(Pose(0, 0, 0), -1.0, math.pi / 2, VehicleParams(1.0, 1.0))
    # right turn of radius 1: centre (0, -1)
    assert p.x == pytest.approx(1.0) and p.y == pytest.approx(-1.0)
    assert p.theta == pytest.approx(-math.pi / 2)


def test_small_rate_is_continuous():
    veh = VehicleParams()
    a = integrate_step(Pose(0, 0, 0.3), 1e-13, 0.5, veh)
    b = integrate_step(Pose(0, 0, 0.3), 2e-5, 0.5, veh)
    assert abs(a.x - b.x) < 1e-5 and abs(a.y - b.y) < 1e-5


def test_matches_ode_solver():
    veh = VehicleParams(1.3, 0.7)

    def rhs(t, y):
        return [veh.v * math.cos(y[2]), veh.v * math.sin(y[2]), 0.45]

    sol = solve_ivp(rhs, (0, 3.0), [1.0, -2.0, 0.2], rtol=1e-12, atol=1e-12)
    p = integrate_step(Pose(1.0, -2.0, 0.2), 0.45, 3.0, veh)
    np.testing.assert_allclose([p.x, p.y, p.theta], sol.y[:, -1], atol=1e-9)


def test_saturation_and_dt_checks():
    with pytest.raises(ControlSaturationError):
        integrate_step(Pose(0, 0, 0), 1.5, 0.1, VehicleParams(1.0, 1.0))
    with pytest.raises(ValueError):
        integrate_step(Pose(0, 0, 0), 0.0, 0.0, VehicleParams())
