# %% [markdown]
# # A tour of the scenario corpus
#
# Runs the basic navigation law on every standard scenario, prints the
# outcome and writes a colored SVG of each trajectory to `demos/out/`.

# %%
from pathlib import Path

from mazenav.harness.audit import sliding_errors
from mazenav.harness.corpus import corpus
from mazenav.harness.export import export
from mazenav.harness.simulate import run_simulation

OUT = Path(__file__).resolve().parent / "out"
OUT.mkdir(exist_ok=True)

# %% [markdown]
# Each run stops at the target, on timeout, or if the vehicle would enter
# the obstacle.  `min_d` is the closest approach; it should never drop
# below `d_safe = 1.5`.

# %%
for name, sc in corpus().items():
    rec = run_simulation(sc)
    dev, bmax = sliding_errors(rec)
    print(f"{name:10s} {rec.termination:15s} t={rec.t[-1]:8.2f} "
          f"switches={rec.n_switches} min_d={rec.min_d:.3f} "
          f"smec_dev={dev:.1e} smt_beta={bmax:.1e}")
    export(rec, "svg", OUT / f"{name}_basic.svg", scenario=sc)

# %% [markdown]
# The spiral is reached here only because its scenario starts with
# `sigma0 = -1`; see `02_locked_spiral.py` for the other direction.
