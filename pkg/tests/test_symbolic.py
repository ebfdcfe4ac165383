import math

import numpy as np
import pytest

from mazenav.geometry.caves import cave_between
from mazenav.geometry.frames import DomainStats, default_d_sharp, domain_stats, r_turning
from mazenav.geometry.shapes import circle
from mazenav.harness.corpus import BUILDERS
from mazenav.symbolic import (ARRIVED, FOLLOW, SMT, PolygonDomain, PreconditionError,
                              SymbolicPathError, boundary_r_turning, non_termination_cap,
                              single_segments, smt_upper_bound, symbolic_path,
                              turning_identity_residual, unwrap_abscissa)

SQUARE = PolygonDomain([(0, 0), (4, 0), (4, 4), (0, 4)])


def _stats(P, Q, K=0):
    return DomainStats(P, Q, 0, K, 1.0)


class TestPolygonDomain:
    def test_orientation_normalized(self):
        cw = PolygonDomain([(0, 0), (0, 4), (4, 4), (4, 0)])
        assert cw.perimeter == pytest.approx(16.0)
        assert np.sum(cw.turns) == pytest.approx(2 * math.pi)

    def test_interior_and_boundary(self):
        assert SQUARE.interior((2, 2))
        assert not SQUARE.interior((5, 2))
        assert SQUARE.winding((4, 2)) is None

    def test_first_hit(self):
        t, k, f = SQUARE.first_hit((-2, 2), (6, 2))
        assert t == pytest.approx(0.25) and k == 3 and f == pytest.approx(0.5)
        assert SQUARE.first_hit((-2, 5), (6, 5)) is None

    def test_grazing_a_corner_is_free(self):
        # passes along the top edge from outside: no entry into the interior
        assert SQUARE.first_hit((-2, 4), (6, 4)) is None

    def test_boundary_between(self):
        pts = SQUARE.boundary_between(2.0, 10.0, 1)
        np.testing.assert_allclose(pts, [[4, 0], [4, 4]])
        pts = SQUARE.boundary_between(2.0, 10.0, -1)
        np.testing.assert_allclose(pts, [[0, 0], [0, 4]])

    def test_from_obstacle(self):
        dom = PolygonDomain.from_obstacle(circle((0, 0), 5.0), d=1.0)
        assert dom.perimeter == pytest.approx(2 * math.pi * 6, rel=1e-4)


class TestBounds:
    @pytest.mark.parametrize("P,Q,bound", [(0, 0, 2), (0, 2, 4), (1, 2, 8), (2, 4, 18)])
    def test_smt_upper_bound(self, P, Q, bound):
        assert smt_upper_bound(_stats(P, Q)) == bound

    def test_u_maze_hand_count(self):
        # two concave stretches, two tangency points for a target inside the U
        sc = BUILDERS["u_inside"]()
        st = domain_stats(sc.obstacle, sc.target,
                          default_d_sharp(sc.obstacle, sc.target, sc.nav.d_trig))
        assert (st.P, st.Q) == (2, 2)
        assert smt_upper_bound(st) == 12

    def test_cap(self):
        assert non_termination_cap(_stats(1, 2, K=3)) == 19


class TestPaths:
    def test_free_line(self):
        sp = symbolic_path(SQUARE, (10, 10), (5, 0), 1)
        assert sp.success and sp.n_smt == 1 and sp.arcs == []
        assert sp.t[-1] == pytest.approx(math.hypot(5, 10))

    @pytest.mark.parametrize("turn", [1, -1])
    def test_convex_two_moves(self, turn):
        sp = symbolic_path(SQUARE, (6, 2), (-2, 2.5), turn)
        assert sp.termination == ARRIVED
        assert sp.n_smt == 2 and len(sp.arcs) == 1
        assert sp.arcs[0][2] == turn

    def test_convex_path_length(self):
        sp = symbolic_path(SQUARE, (6, 2), (-2, 2), 1)
        assert sp.arcs[0][2] == 1
        # up the left side, across the top edge, then straight to the target
        sp = symbolic_path(SQUARE, (6, 2), (-2, 2), -1)
        expect = 2 + 2 + 4 + math.hypot(2, 2)
        assert sp.t[-1] == pytest.approx(expect)

    def test_target_inside_raises(self):
        with pytest.raises(SymbolicPathError):
            symbolic_path(SQUARE, (2, 2), (-2, 2), 1)
        with pytest.raises(SymbolicPathError):
            symbolic_path(SQUARE, (6, 2), (2, 2), 1)
        with pytest.raises(ValueError):
            symbolic_path(SQUARE, (6, 2), (-2, 2), 0)

    def test_columns(self):
        sp = symbolic_path(SQUARE, (6, 2), (-2, 2), 1)
        assert len(sp.t) == len(sp.x) == len(sp.submode) == len(sp)
        assert set(sp.submode) <= {SMT, FOLLOW}
        assert np.all(np.isnan(sp.d[np.array(sp.submode) == SMT]))

    def test_turn_conventions_on_square(self):
        # following the boundary never lets the bearing cross to the wrong side
        for turn in (1, -1):
            sp = symbolic_path(SQUARE, (6, 2), (-2, 2), turn)
            for st in sp.states:
                if st.phase == FOLLOW:
                    assert st.sigma * st.beta >= -1e-9


@pytest.fixture(scope="module", params=["u_trap", "u_inside", "spiral", "labyrinth", "comb"])
def maze(request):
    sc = BUILDERS[request.param]()
    stats = domain_stats(sc.obstacle, sc.target,
                         default_d_sharp(sc.obstacle, sc.target, sc.nav.d_trig))
    return sc, PolygonDomain.from_obstacle(sc.obstacle), stats


def _starts(sc, n, seed):
    rng = np.random.default_rng(seed)
    ob = sc.obstacle
    pts = []
    while len(pts) < n:
        p = np.array([sc.start.x, sc.start.y]) + rng.uniform(-6, 6, 2)
        d, _ = ob.distance_query(p)
        if d > 0.1:
            pts.append(p)
    return pts


class TestMazes:
    @pytest.mark.parametrize("turn", [1, -1])
    def test_terminates_within_bounds(self, maze, turn):
        sc, dom, stats = maze
        bound = smt_upper_bound(stats)
        for p in _starts(sc, 5, 1):
            sp = symbolic_path(dom, sc.target, p, turn, stats=stats)
            assert sp.success, (p, sp.termination)
            assert sp.n_smt <= bound
            assert all(n <= bound for n in single_segments(sp, dom.perimeter))

    def test_sign_of_bearing_while_following(self, maze):
        sc, dom, stats = maze
        for turn in (1, -1):
            sp = symbolic_path(dom, sc.target, (sc.start.x, sc.start.y), turn, stats=stats)
            worst = min((st.sigma * st.beta for st in sp.states if st.phase == FOLLOW),
                        default=0.0)
            assert worst >= -1e-9

    def test_bands_change_only_at_singular_corners(self, maze):
        sc, dom, stats = maze
        for turn in (1, -1):
            sp = symbolic_path(dom, sc.target, (sc.start.x, sc.start.y), turn, stats=stats)
            for sw in sp.sweeps:
                if not sw.singular:
                    assert sw.band_in == sw.band_out, sw


class TestCaveEntry:
    """Target inside the U: once in the cave the path never touches the walls again."""

    def test_from_behind(self):
        sc = BUILDERS["u_inside"]()
        dom = PolygonDomain.from_obstacle(sc.obstacle)
        ob = sc.obstacle
        cave = cave_between(ob, sc.target, ob.nearest((0.0, 12.5))[1],
                            ob.nearest((0.0, -12.5))[1])
        assert cave.contains_target
        for turn in (1, -1):
            sp = symbolic_path(dom, sc.target, (50.0, 2.0), turn)
            assert sp.success
            # the last straight move starts at the cave corner and is the only one inside
            inside = [p for p in sp.smt_starts if cave.contains(p)]
            assert len(inside) <= cave.degree + 1
            assert sp.n_smt == 2

    def test_start_in_cave(self):
        sc = BUILDERS["u_inside"]()
        dom = PolygonDomain.from_obstacle(sc.obstacle)
        for p in [(3.0, 8.0), (18.0, -9.0), (20.0, 9.0)]:
            sp = symbolic_path(dom, sc.target, p, 1)
            assert sp.success and sp.n_smt == 1 and not sp.arcs


class TestTurningIdentity:
    def test_unwrap(self):
        L = 10.0
        np.testing.assert_allclose(unwrap_abscissa([9.0, 9.8, 0.3, 1.0], L), [9, 9.8, 10.3, 11])
        np.testing.assert_allclose(unwrap_abscissa([1.0, 0.2, 9.7], L), [1, 0.2, -0.3])

    def test_full_lap_matches_r_turning(self):
        ob = circle((0, 0), 5.0)
        tgt = np.array([20.0, 3.0])
        full = boundary_r_turning(ob, tgt, np.array([0.0, ob.perimeter]))
        assert full == pytest.approx(r_turning(ob, tgt), abs=1e-6)
        assert full == pytest.approx(-2 * math.pi, abs=1e-6)
        assert full <= -1.5 * math.pi

    def test_degenerate_segment(self):
        ob = circle((0, 0), 5.0)
        xy = np.array([[0.0, 7.0], [0.0, 7.0]])
        rep = turning_identity_residual(ob, (20.0, 3.0), xy, np.array([0.4, 0.4]))
        assert rep.lhs == 0.0 and rep.residual < 1e-12

    def test_offset_arc(self):
        ob = circle((0, 0), 5.0)
        a = np.linspace(0.2, 2.0, 400)
        xy = 6.0 * np.column_stack([np.cos(a), np.sin(a)])
        theta = a + math.pi / 2
        rep = turning_identity_residual(ob, (20.0, -3.0), xy, theta)
        assert rep.sigma == 1
        assert rep.residual < 1e-9

    def test_wiggly_path(self):
        ob = circle((0, 0), 5.0)
        a = np.linspace(0.3, 1.7, 2000)
        rad = 7.0 + 0.5 * np.sin(5 * a)
        xy = np.column_stack([rad * np.cos(a), rad * np.sin(a)])
        theta = np.unwrap(np.arctan2(np.gradient(xy[:, 1]), np.gradient(xy[:, 0])))
        rep = turning_identity_residual(ob, (25.0, 2.0), xy, theta)
        assert rep.residual < 1e-9

    def test_encircled_target_rejected(self):
        ob = circle((0, 0), 5.0)
        a = np.linspace(0.0, 1.5, 300)
        xy = 12.0 * np.column_stack([np.cos(a), np.sin(a)])
        with pytest.raises(PreconditionError):
            turning_identity_residual(ob, (7.0, 5.0), xy, a + math.pi / 2)
