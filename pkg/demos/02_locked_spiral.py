# %% [markdown]
# # Escaping a locked configuration
#
# In the spiral scenario the target sits in a cave whose corners line up
# with it.  Turning left at the first encounter sends the basic law round
# the outside of the spiral forever.  Randomizing the turn direction, or
# choosing it by the cave rule, gets out.

# %%
from pathlib import Path

import numpy as np

from mazenav.geometry.caves import radial_caves
from mazenav.harness.corpus import spiral_scenario
from mazenav.harness.export import export
from mazenav.harness.montecarlo import monte_carlo
from mazenav.harness.simulate import run_simulation

OUT = Path(__file__).resolve().parent / "out"
OUT.mkdir(exist_ok=True)

sc = spiral_scenario(sigma0=1)
caves = radial_caves(sc.obstacle, sc.target, sc.nav.d_trig)
print("target locked:", caves.locked(sc.target))

# %%
stuck = run_simulation(sc, t_max=300.0)
print("basic, sigma=+1:", stuck.termination, "after", stuck.n_switches, "switches")
export(stuck, "svg", OUT / "spiral_stuck.svg", scenario=sc)

# %%
det = run_simulation(sc.with_policy("deterministic"))
print("deterministic:", det.termination, "switches", det.n_switches,
      "directions", [e.sigma for e in det.events if e.kind == "A->B"])
export(det, "svg", OUT / "spiral_deterministic.svg", scenario=sc)

# %% [markdown]
# A seeded batch of randomized runs.  Each run draws from its own stream,
# so the batch gives the same numbers on every machine.

# %%
summ = monte_carlo(sc.with_policy("randomized", p=0.5), 20, master_seed=0)
for line in summ.lines():
    print(line)
print("switch histogram:", np.bincount(summ.switch_counts))
