# %% [markdown]
# # Symbolic paths and the turning identity
#
# A symbolic path moves straight at the target and, on hitting the
# boundary, walks along it until the target can be seen around a corner.
# Its straight-move count is bounded by (P+1)(Q+2) where P counts concave
# boundary stretches and Q the zero set of the target's normal coordinate.

# %%
from pathlib import Path

import numpy as np

from mazenav.geometry.frames import default_d_sharp, domain_stats
from mazenav.harness.corpus import labyrinth_scenario
from mazenav.harness.export import export
from mazenav.harness.simulate import run_simulation
from mazenav.symbolic import (PolygonDomain, single_segments, smt_upper_bound, symbolic_path,
                              turning_identity_residual)

OUT = Path(__file__).resolve().parent / "out"
OUT.mkdir(exist_ok=True)

sc = labyrinth_scenario()
stats = domain_stats(sc.obstacle, sc.target,
                     default_d_sharp(sc.obstacle, sc.target, sc.nav.d_trig))
dom = PolygonDomain.from_obstacle(sc.obstacle)
print(stats, "bound", smt_upper_bound(stats))

# %%
for turn in (1, -1):
    sp = symbolic_path(dom, sc.target, (sc.start.x, sc.start.y), turn, stats=stats)
    print(f"first turn {turn:+d}: {sp.termination}, straight moves {sp.n_smt}, "
          f"per single segment {single_segments(sp, dom.perimeter)}, length {sp.t[-1]:.1f}")
    export(sp, "svg", OUT / f"labyrinth_symbolic_{turn:+d}.svg", scenario=sc)

# %% [markdown]
# Along a wall-following stretch of a real run, the turning of the bearing
# equals the target-relative turning of the boundary plus end corrections.

# %%
rec = run_simulation(sc)
b = np.nonzero((np.asarray(rec.mode) == "B") & (np.asarray(rec.submode) == "SMEC"))[0]
i, j = b[0], b[0] + min(400, len(b) - 1)
rep = turning_identity_residual(sc.obstacle, sc.target, np.c_[rec.x[i:j], rec.y[i:j]],
                                rec.theta[i:j], rec.s[i:j])
print(f"bearing turning {rep.lhs:.6f}  boundary side {rep.rhs:.6f}  residual {rep.residual:.1e}")
