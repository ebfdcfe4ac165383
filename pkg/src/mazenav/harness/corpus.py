"""Standard scenario corpus.

All scenarios share R = 1 (v = 1, u_max = 1), d_safe = 1.5, d_trig = 4
and d_range = 5.  Walls are 2 thick with unit convex fillets; every
concave corner is rounded with radius 6 so that R_D - R = 5 > d_trig,
and corridors are wide enough for a regular margin above d_trig.
"""

from __future__ import annotations

import math

from ..controller import NavParams
from ..geometry.shapes import circle, filleted_polygon, rounded_polygon, thick_path
from ..vehicle import Pose, VehicleParams
from .scenario import Scenario

VEH = VehicleParams(1.0, 1.0)
WALL = 2.0
CONVEX_R = 1.0
CONCAVE_R = 6.0


def _nav(policy="basic", sigma0=1, p=0.5):
    return NavParams(d_safe=1.5, d_trig=4.0, d_range=5.0, p=p, sigma0=sigma0, policy=policy)


def _wall(points):
    return thick_path(points, WALL, CONVEX_R, CONCAVE_R)


def circle_scenario(**kw) -> Scenario:
    return Scenario(circle((0.0, 0.0), 5.0), (20.0, 1.0), Pose(-20.0, 0.0, 0.0), VEH,
                    _nav(**kw), "circle")


def square_scenario(**kw) -> Scenario:
    ob = filleted_polygon([(-10, -10), (10, -10), (10, 10), (-10, 10)], 1.0)
    return Scenario(ob, (25.0, 0.0), Pose(-25.0, 0.5, 0.0), VEH, _nav(**kw), "square")


def u_maze_obstacle():
    """U-shaped wall opening towards -x; cavity about 22 x 24."""
    return _wall([(0, 13), (24, 13), (24, -13), (0, -13)])


def u_trap_scenario(**kw) -> Scenario:
    """Start facing into the U, target behind its bottom."""
    return Scenario(u_maze_obstacle(), (45.0, 0.0), Pose(-20.0, 0.3, 0.0), VEH,
                    _nav(**kw), "u_trap")


def u_inside_scenario(**kw) -> Scenario:
    """Target inside the U, start behind its bottom."""
    return Scenario(u_maze_obstacle(), (12.0, 0.0), Pose(50.0, 2.0, math.pi), VEH,
                    _nav(**kw), "u_inside")


def two_lobe_obstacle():
    """Peanut-like body with a concave waist on both sides."""
    verts = [(-22, -12), (0, -5), (22, -12), (22, 12), (0, 5), (-22, 12)]
    return rounded_polygon(verts, 4.0, CONCAVE_R)


def two_lobe_scenario(**kw) -> Scenario:
    return Scenario(two_lobe_obstacle(), (0.0, 22.0), Pose(0.0, -30.0, math.pi / 2), VEH,
                    _nav(**kw), "two_lobe")


def spiral_obstacle():
    """Square spiral wall with 12-wide corridors winding in to the centre."""
    pts = [(7, 0), (7, 14), (-21, 14), (-21, -28), (35, -28), (35, 42), (-49, 42)]
    return _wall(pts)


def spiral_scenario(**kw) -> Scenario:
    """Target locked at the spiral's core.

    Counterclockwise following (sigma = +1) sends the basic law around the
    outside forever; the default sigma0 = -1 winds inwards.
    """
    kw.setdefault("sigma0", -1)
    return Scenario(spiral_obstacle(), (-7.0, -7.0), Pose(-70.0, 60.0, 0.0), VEH,
                    _nav(**kw), "spiral")


def comb_obstacle():
    """E-shaped body: three teeth pointing to -x around two deep bays."""
    verts = [(0, -31), (30, -31), (30, 31), (0, 31), (0, 29), (28, 29), (28, 1), (0, 1),
             (0, -1), (28, -1), (28, -29), (0, -29)]
    return rounded_polygon(verts, CONVEX_R, CONCAVE_R)


def comb_scenario(**kw) -> Scenario:
    """Start aimed into the upper bay, target behind the spine."""
    return Scenario(comb_obstacle(), (55.0, 0.0), Pose(-25.0, 14.0, 0.0), VEH,
                    _nav(**kw), "comb")


def labyrinth_obstacle():
    """Serpentine wall forming four deep pockets alternately open up and down."""
    return _wall([(0, 0), (0, 44), (16, 44), (16, 0), (32, 0), (32, 44), (48, 44), (48, 0),
                  (64, 0)])


def labyrinth_scenario(**kw) -> Scenario:
    """Target at the bottom of an inner pocket, start below the maze."""
    return Scenario(labyrinth_obstacle(), (24.0, 36.0), Pose(20.0, -30.0, math.pi / 2), VEH,
                    _nav(**kw), "labyrinth")


def zigzag_obstacle():
    return _wall([(0, -30), (0, 10), (20, 10), (20, -10), (40, -10), (40, 30)])


def zigzag_scenario(**kw) -> Scenario:
    return Scenario(zigzag_obstacle(), (60.0, 0.0), Pose(-25.0, 1.0, 0.0), VEH,
                    _nav(**kw), "zigzag")


BUILDERS = {
    "circle": circle_scenario,
    "square": square_scenario,
    "u_trap": u_trap_scenario,
    "u_inside": u_inside_scenario,
    "two_lobe": two_lobe_scenario,
    "spiral": spiral_scenario,
    "comb": comb_scenario,
    "labyrinth": labyrinth_scenario,
    "zigzag": zigzag_scenario,
}


def corpus(policy: str = "basic", **kw) -> dict:
    """All standard scenarios keyed by name."""
    return {name: build(policy=policy, **kw) for name, build in BUILDERS.items()}
