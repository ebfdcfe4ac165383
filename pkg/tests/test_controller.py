import math

import numpy as np
import pytest

from mazenav.controller import (EPS_BETA, IT, MODE_A, MODE_B, SMEC, SMT, TURN, ControllerState,
                                GeomContext, NavParams, control_step, sense, sigma_update,
                                smec_control, tuning_checks)
from mazenav.geometry.boundary import PenetrationError
from mazenav.geometry.caves import cave_between
from mazenav.geometry.shapes import circle
from mazenav.harness.corpus import BUILDERS
from mazenav.vehicle import Pose, VehicleParams

VEH = VehicleParams(1.0, 1.0)
NAV = NavParams(1.5, 4.0, 5.0)


def _ctx(ob, target, dt=0.005, nav=NAV):
    return GeomContext(ob, np.asarray(target, float), VEH, nav, dt)


class TestNavParams:
    def test_bad_policy(self):
        with pytest.raises(ValueError):
            NavParams(1.5, 4.0, 5.0, policy="greedy")

    def test_bad_sigma0(self):
        with pytest.raises(ValueError):
            NavParams(1.5, 4.0, 5.0, sigma0=0)

    def test_tuning_chain_convex(self):
        checks = tuning_checks(VEH, NAV, math.inf, math.inf)
        assert all(ok for _, ok, _ in checks)

    def test_trigger_too_small(self):
        checks = dict((n, ok) for n, ok, _ in tuning_checks(VEH, NavParams(1.5, 3.0, 5.0),
                                                              math.inf, math.inf))
        assert not checks["d_safe + 2R < d_trig"]


class TestSense:
    def test_heading_at_target(self):
        ob = circle((0, 0), 1.0)
        sr = sense(Pose(-10, 5, 0.0), ob, (10, 5), None, VEH, NAV)
        assert sr.beta == 0.0 and sr.h == pytest.approx(20.0)
        assert sr.d is None

    def test_range_cutoff(self):
        ob = circle((0, 0), 1.0)
        inside = sense(Pose(0, 5.999, 0.0), ob, (10, 10), None, VEH, NAV)
        outside = sense(Pose(0, 6.001, 0.0), ob, (10, 10), None, VEH, NAV)
        assert inside.d == pytest.approx(4.999)
        assert outside.d is None

    def test_bearing_accumulates_full_turn(self):
        ob = circle((100, 100), 1.0)
        tgt = np.zeros(2)
        prev = None
        # circle the target counterclockwise while keeping it on the left
        for a in np.linspace(0, 2 * np.pi, 200):
            pose = Pose(5 * math.cos(a), 5 * math.sin(a), a + math.pi / 2)
            prev = sense(pose, ob, tgt, prev, VEH, NAV)
        # the line of sight turns by 2 pi while the heading turns by 2 pi
        assert prev.beta == pytest.approx(math.pi / 2, abs=1e-9)
        prev2 = None
        for a in np.linspace(0, 2 * np.pi, 200):
            pose = Pose(5 * math.cos(a), 5 * math.sin(a), 0.0)
            prev2 = sense(pose, ob, tgt, prev2, VEH, NAV)
        first = sense(Pose(5, 0, 0.0), ob, tgt, None, VEH, NAV).beta
        assert prev2.beta - first == pytest.approx(2 * math.pi, abs=1e-9)

    def test_distance_rate(self):
        ob = circle((0, 0), 5.0)
        sr = sense(Pose(0, 7, -math.pi / 2), ob, (20, 20), None, VEH, NAV)
        assert sr.d_dot == pytest.approx(-1.0)
        assert sr.alpha == pytest.approx(math.pi / 2)

    def test_penetration(self):
        ob = circle((0, 0), 5.0)
        with pytest.raises(PenetrationError):
            sense(Pose(1, 1, 0), ob, (20, 20), None, VEH, NAV)


class TestControlStep:
    def test_far_pursuit_saturates(self):
        ob = circle((0, 0), 1.0)
        ctx = _ctx(ob, (30, 30))
        pose = Pose(-20, 0, math.atan2(30, 50) - 0.3)
        sr = sense(pose, ob, ctx.target, None, VEH, NAV)
        assert sr.beta == pytest.approx(0.3)
        u, cs, _ = control_step(ControllerState(), sr, ctx)
        assert u == 1.0 and cs.mode == MODE_A and cs.submode == TURN

    def test_straight_pursuit_is_smt(self):
        ob = circle((0, 0), 1.0)
        ctx = _ctx(ob, (30, 0))
        sr = sense(Pose(-20, 10, math.atan2(-10, 50)), ob, ctx.target, None, VEH, NAV)
        u, cs, ev = control_step(ControllerState(), sr, ctx)
        assert abs(u) < 1e-9 and cs.submode == SMT
        assert ev and ev[0].after == SMT

    def test_initial_turn_away(self):
        ob = circle((0, 0), 5.0)
        ctx = _ctx(ob, (30, 0))
        # just inside the trigger distance, heading at the obstacle
        sr = sense(Pose(-8.99, 0, 0.0), ob, ctx.target, None, VEH, NAV)
        u, cs, ev = control_step(ControllerState(sigma=1), sr, ctx)
        assert cs.mode == MODE_B and cs.submode == IT
        assert u == -1.0
        assert [e.kind for e in ev] == ["A->B"]

    def test_initial_turn_negative_sigma(self):
        ob = circle((0, 0), 5.0)
        ctx = _ctx(ob, (30, 0))
        sr = sense(Pose(-8.99, 0, 0.0), ob, ctx.target, None, VEH, NAV)
        u, cs, _ = control_step(ControllerState(sigma=-1), sr, ctx)
        assert u == 1.0 and cs.sigma == -1

    def test_smec_equivalent_control_on_circle(self):
        ob = circle((0, 0), 5.0)
        ctx = _ctx(ob, (30, 30))
        # at distance 1, moving counterclockwise along the offset circle
        sr = sense(Pose(6, 0, math.pi / 2), ob, ctx.target, None, VEH, NAV)
        cs = ControllerState(mode=MODE_B, submode=SMEC, sigma=1, smec_d=1.0)
        assert smec_control(cs, sr, ctx) == pytest.approx(1 / 6)

    def test_smec_holds_distance(self):
        ob = circle((0, 0), 5.0)
        ctx = _ctx(ob, (30, 30))
        from mazenav.vehicle import integrate_step
        pose = Pose(6, 0, math.pi / 2)
        cs = ControllerState(mode=MODE_B, submode=SMEC, sigma=1, smec_d=1.0)
        worst = 0.0
        for _ in range(2000):
            sr = sense(pose, ob, ctx.target, None, VEH, NAV)
            pose = integrate_step(pose, smec_control(cs, sr, ctx), ctx.dt, VEH)
            worst = max(worst, abs(math.hypot(pose.x, pose.y) - 6.0))
        assert worst <= 1e-4

    def test_exit_to_mode_a(self):
        ob = circle((0, 0), 5.0)
        ctx = _ctx(ob, (30, 0))
        # moving away, beyond the trigger distance, target straight ahead
        sr = sense(Pose(9.01, 0, 0.0), ob, ctx.target, None, VEH, NAV)
        cs = ControllerState(mode=MODE_B, submode=SMT, sigma=1)
        u, cs2, ev = control_step(cs, sr, ctx, t=1.0, pos=(9.01, 0.0))
        assert cs2.mode == MODE_A and [e.kind for e in ev] == ["B->A"]
        assert cs2.r_exit == (9.01, 0.0) and ev[0].t == 1.0


class TestSigmaUpdate:
    def test_basic_keeps(self):
        assert sigma_update("basic", -1) == -1

    def test_randomized_degenerate(self):
        rng = np.random.default_rng(0)
        assert all(sigma_update("randomized", -1, rng, p=1.0) == 1 for _ in range(50))
        assert all(sigma_update("randomized", 1, rng, p=0.0) == -1 for _ in range(50))

    def test_randomized_frequency(self):
        rng = np.random.default_rng(1)
        draws = [sigma_update("randomized", 1, rng, p=0.3) for _ in range(20000)]
        assert np.mean(np.array(draws) == 1) == pytest.approx(0.3, abs=0.015)

    def test_deterministic_first_uses_sigma0(self):
        assert sigma_update("deterministic", 1, first=True, sigma0=-1) == -1

    def test_deterministic_target_in_cave_flips(self):
        sc = BUILDERS["u_inside"]()
        ob = sc.obstacle
        cave = cave_between(ob, sc.target, ob.nearest((0.0, 12.5))[1], ob.nearest((0.0, -12.5))[1])
        assert cave.contains_target
        assert sigma_update("deterministic", 1, cave=cave) == -cave.direction

    def test_deterministic_free_cave_keeps_direction(self):
        sc = BUILDERS["u_trap"]()
        ob = sc.obstacle
        cave = cave_between(ob, sc.target, ob.nearest((0.0, 12.5))[1], ob.nearest((0.0, -12.5))[1])
        assert not cave.contains_target
        assert sigma_update("deterministic", -1, cave=cave) == cave.direction


def test_smt_band_constant():
    assert 2 * EPS_BETA == pytest.approx(2e-3)
    assert IT != SMEC != SMT and MODE_A != MODE_B
