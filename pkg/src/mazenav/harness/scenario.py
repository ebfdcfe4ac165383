"""Scenario files and their validation.

Scenarios are JSON documents::

    {
      "vehicle": {"v": 1.0, "u_max": 1.0},
      "nav": {"d_safe": 1.5, "d_trig": 4.0, "d_range": 5.0,
              "p": 0.5, "sigma0": 1, "policy": "basic"},
      "target": [x, y],
      "start": {"x": ..., "y": ..., "theta": ...},
      "obstacle": [{"kind": "line", "from": [x, y], "to": [x, y]},
                   {"kind": "arc", "center": [x, y], "radius": r,
                    "from_angle": deg, "to_angle": deg, "ccw": true}]
    }

Arc angles are in degrees; ``theta`` is in radians.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from ..controller import NavParams, tuning_checks
from ..geometry.boundary import BoundarySegment, Obstacle, build_obstacle
from ..geometry.caves import radial_caves
from ..vehicle import Pose, VehicleParams


class ScenarioError(ValueError):
    """Malformed or unreadable scenario document."""


@dataclass(frozen=True, eq=False)
class Scenario:
    obstacle: Obstacle
    target: tuple
    start: Pose
    veh: VehicleParams
    nav: NavParams
    name: str = ""

    def with_policy(self, policy: str, **kw) -> "Scenario":
        return replace(self, nav=replace(self.nav, policy=policy, **kw))

    def with_start(self, start: Pose) -> "Scenario":
        return replace(self, start=start)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "vehicle": {"v": self.veh.v, "u_max": self.veh.u_max},
            "nav": {"d_safe": self.nav.d_safe, "d_trig": self.nav.d_trig,
                    "d_range": self.nav.d_range, "p": self.nav.p,
                    "sigma0": self.nav.sigma0, "policy": self.nav.policy},
            "target": [float(self.target[0]), float(self.target[1])],
            "start": {"x": self.start.x, "y": self.start.y, "theta": self.start.theta},
            "obstacle": [g.to_dict() for g in self.obstacle.segments],
        }


def scenario_from_dict(doc: dict) -> Scenario:
    """Build a scenario from its document tree; raises ``ScenarioError``."""
    try:
        veh = VehicleParams(float(doc["vehicle"]["v"]), float(doc["vehicle"]["u_max"]))
        n = doc["nav"]
        nav = NavParams(float(n["d_safe"]), float(n["d_trig"]), float(n["d_range"]),
                        float(n.get("p", 0.5)), int(n.get("sigma0", 1)),
                        str(n.get("policy", "basic")))
        tx, ty = doc["target"]
        st = doc["start"]
        start = Pose(float(st["x"]), float(st["y"]), float(st.get("theta", 0.0)))
        segs = [BoundarySegment.from_dict(s) for s in doc["obstacle"]]
        obstacle = build_obstacle(segs)
    except (KeyError, TypeError, ValueError) as exc:
        raise ScenarioError(f"invalid scenario: {exc}") from exc
    return Scenario(obstacle, (float(tx), float(ty)), start, veh, nav, str(doc.get("name", "")))


def load_scenario(path) -> Scenario:
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ScenarioError(f"cannot read scenario {path}: {exc}") from exc
    return scenario_from_dict(doc)


def save_scenario(sc: Scenario, path) -> None:
    Path(path).write_text(json.dumps(sc.to_dict(), indent=2) + "\n")


@dataclass
class ValidationReport:
    """Each check is ``(name, passed, margin)``; warnings do not fail."""

    checks: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c[1] for c in self.checks)

    def lines(self) -> list:
        out = [f"{'PASS' if ok else 'FAIL'}  {name}  (margin {m:.6g})" for name, ok, m in self.checks]
        out += [f"WARN  {w}" for w in self.warnings]
        return out


def validate_scenario(sc: Scenario, check_locks: bool | None = None) -> ValidationReport:
    """Check the threshold chain, clearance of start and target, and locks.

    The lock test runs by default only for the basic policy, whose
    convergence needs both the start and the target unlocked.
    """
    rep = ValidationReport()
    obs, nav, R = sc.obstacle, sc.nav, sc.veh.R
    rep.checks += tuning_checks(sc.veh, nav, obs.d_star, obs.R_D)
    r0 = np.array([sc.start.x, sc.start.y])
    tgt = np.asarray(sc.target, dtype=float)
    d0, _, in0 = obs.nearest(r0)
    dT, _, inT = obs.nearest(tgt)
    d0 = -d0 if in0 else d0
    dT = -dT if inT else dT
    rep.checks.append(("dist(start) > d_trig + 2R", d0 > nav.d_trig + 2 * R, d0 - nav.d_trig - 2 * R))
    sep = float(np.hypot(*(r0 - tgt)))
    rep.checks.append(("|start - target| > 2R", sep > 2 * R, sep - 2 * R))
    rep.checks.append(("dist(target) > d_trig", dT > nav.d_trig, dT - nav.d_trig))
    if check_locks is None:
        check_locks = nav.policy == "basic"
    if check_locks and dT > nav.d_trig and d0 > nav.d_trig:
        caves = radial_caves(obs, tgt, nav.d_trig)
        for label, p in (("start", r0), ("target", tgt)):
            if caves.locked(p):
                rep.warnings.append(f"{label} is locked; the basic policy may not converge")
    return rep
