"""Property-based checks of invariants."""

import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from mazenav.geometry.caves import cave_between
from mazenav.geometry.frames import frame_arrays
from mazenav.geometry.shapes import thick_path
from mazenav.harness.corpus import BUILDERS, u_maze_obstacle
from mazenav.harness.export import csv_text, read_csv
from mazenav.symbolic import FOLLOW, PolygonDomain, symbolic_path
from mazenav.vehicle import Pose, VehicleParams, integrate_step

SETTINGS = settings(max_examples=40, deadline=None)
finite = st.floats(-50, 50, allow_nan=False)

U_OB = u_maze_obstacle()
U_TARGETS = {"u_trap": (45.0, 0.0), "u_inside": (12.0, 0.0)}
U_DOMAIN = PolygonDomain.from_obstacle(U_OB)
OBSTACLES = {n: BUILDERS[n]().obstacle for n in ("circle", "square", "u_trap", "spiral")}


@SETTINGS
@given(x=finite, y=finite, th=st.floats(-4, 4), u=st.floats(-1, 1), dt=st.floats(1e-3, 2.0),
       c=st.floats(0.2, 5.0))
def test_speed_rescaling_keeps_the_path(x, y, th, u, dt, c):
    # scaling v and u_max together keeps R; the same path is traced c times faster
    a = integrate_step(Pose(x, y, th), u, dt, VehicleParams(1.0, 1.0))
    b = integrate_step(Pose(x, y, th), c * u, dt / c, VehicleParams(c, c))
    assert a.x == pytest.approx(b.x, abs=1e-9)
    assert a.y == pytest.approx(b.y, abs=1e-9)
    assert a.theta == pytest.approx(b.theta, abs=1e-9)


@SETTINGS
@given(us=st.lists(st.floats(-1, 1), min_size=5, max_size=40), v=st.floats(0.3, 3.0),
       um=st.floats(0.2, 2.0))
def test_path_curvature_bounded(us, v, um):
    veh = VehicleParams(v, um)
    dt = 0.05
    p = Pose(0.0, 0.0, 0.0)
    pts = [(p.x, p.y)]
    for w in us:
        p = integrate_step(p, w * um, dt, veh)
        pts.append((p.x, p.y))
    P = np.array(pts)
    # three-point circle through consecutive samples never beats the turning radius
    for a, b, c in zip(P[:-2], P[1:-1], P[2:]):
        ab, bc, ca = np.linalg.norm(b - a), np.linalg.norm(c - b), np.linalg.norm(a - c)
        area2 = abs((b - a)[0] * (c - a)[1] - (b - a)[1] * (c - a)[0])
        k = 2 * area2 / (ab * bc * ca)
        assert k <= 1.0 / veh.R * (1 + 1e-6) + 1e-9


@SETTINGS
@given(dx=st.floats(-100, 100), dy=st.floats(-100, 100),
       which=st.sampled_from(sorted(U_TARGETS)))
def test_cave_degree_translation_invariant(dx, dy, which):
    pts = np.array([(0, 13), (24, 13), (24, -13), (0, -13)], float)
    tgt = np.asarray(U_TARGETS[which])
    shift = np.array([dx, dy])
    moved = thick_path(pts + shift, 2.0, 1.0, 6.0)
    ref = cave_between(U_OB, tgt, U_OB.nearest((0.0, 12.5))[1], U_OB.nearest((0.0, -12.5))[1])
    c = cave_between(moved, tgt + shift, moved.nearest(shift + (0.0, 12.5))[1],
                     moved.nearest(shift + (0.0, -12.5))[1])
    assert c.degree == ref.degree
    assert c.contains_target == ref.contains_target
    assert c.area == pytest.approx(ref.area, rel=1e-6)


@SETTINGS
@given(frac=st.floats(0, 1, exclude_max=True), q=st.floats(0.02, 0.95),
       name=st.sampled_from(["circle", "square", "u_trap", "spiral"]))
def test_offset_distance_roundtrip(frac, q, name):
    ob = OBSTACLES[name]
    d = q * min(ob.d_star, 20.0)
    s = frac * ob.perimeter
    p, _ = ob.offset_point(s, d)
    dist, s_back = ob.distance_query(p)
    assert dist == pytest.approx(d, abs=1e-8)
    gap = (s_back - s + 0.5 * ob.perimeter) % ob.perimeter - 0.5 * ob.perimeter
    assert abs(gap) < 1e-6


@SETTINGS
@given(frac=st.floats(0, 1, exclude_max=True), tx=st.floats(-60, 60), ty=st.floats(-60, 60))
def test_frame_norm_is_target_distance(frac, tx, ty):
    ob = OBSTACLES["u_trap"]
    s = np.array([frac * ob.perimeter])
    lam, zeta = frame_arrays(ob, s, (tx, ty))[:2]
    rho = ob.boundary_eval(float(s[0])).position
    assert math.hypot(lam[0], zeta[0]) == pytest.approx(math.hypot(tx - rho[0], ty - rho[1]),
                                                        rel=1e-9, abs=1e-9)


@settings(max_examples=25, deadline=None)
@given(x=st.floats(-25, 60), y=st.floats(-30, 30), turn=st.sampled_from([1, -1]),
       which=st.sampled_from(sorted(U_TARGETS)))
def test_symbolic_bearing_sign(x, y, turn, which):
    d, _, inside = U_OB.nearest((x, y))
    assume(not inside and d >= 0.05)
    sp = symbolic_path(U_DOMAIN, U_TARGETS[which], (x, y), turn)
    assert sp.success
    for s in sp.states:
        if s.phase == FOLLOW:
            assert s.sigma * s.beta >= -1e-9


@SETTINGS
@given(vals=st.lists(st.floats(allow_nan=False, allow_infinity=False, width=64),
                     min_size=1, max_size=12))
def test_csv_float_roundtrip(tmp_path_factory, vals):
    n = len(vals)
    v = np.array(vals)
    rec = type("Rec", (), dict(t=v, x=v, y=v, theta=v, u=v, d=v, beta=v,
                               mode=["A"] * n, submode=["TURN"] * n, sigma=np.ones(n, int)))()
    path = tmp_path_factory.mktemp("csv") / "r.csv"
    path.write_text(csv_text(rec))
    back = read_csv(path)
    np.testing.assert_array_equal(back.x, v)
