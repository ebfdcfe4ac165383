"""Seeded batches of randomized runs.

Run ``i`` of a batch draws its turn directions from the stream
``run_rng(master_seed, i)``, so results do not depend on how the runs are
scheduled.  Aggregation folds the records in run order.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .scenario import Scenario
from .simulate import ARRIVED, run_rng, run_simulation


@dataclass
class McSummary:
    n: int
    successes: int
    switch_counts: list
    terminations: list
    arrival_times: list
    min_d: list
    wall_time: float
    extras: dict = field(default_factory=dict)

    @property
    def success_fraction(self) -> float:
        return self.successes / self.n if self.n else float("nan")

    def lines(self) -> list:
        sw = np.asarray(self.switch_counts)
        out = [f"runs {self.n}  successes {self.successes}  fraction {self.success_fraction:.4g}"]
        if self.n:
            out.append(f"switches min {sw.min()} median {np.median(sw):g} max {sw.max()}")
            out.append(f"min distance {min(self.min_d):.6g}  wall time {self.wall_time:.3g} s")
        return out


def _one(args):
    sc, seed, i, dt, t_max = args
    rec = run_simulation(sc, dt=dt, t_max=t_max, rng=run_rng(seed, i))
    return rec.termination, rec.n_switches, rec.arrival_time, rec.min_d


def monte_carlo(sc: Scenario, n_runs: int, master_seed: int = 0, dt: float | None = None,
                t_max: float | None = None, workers: int = 1) -> McSummary:
    """Run ``n_runs`` independent seeded simulations of ``sc``.

    ``workers > 1`` spreads runs over processes; the summary is identical
    either way.
    """
    t0 = time.perf_counter()
    jobs = [(sc, int(master_seed), i, dt, t_max) for i in range(int(n_runs))]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_one, jobs))
    else:
        results = [_one(j) for j in jobs]
    terms = [r[0] for r in results]
    return McSummary(
        n=len(results),
        successes=sum(1 for r in results if r[0] == ARRIVED),
        switch_counts=[r[1] for r in results],
        terminations=terms,
        arrival_times=[r[2] for r in results],
        min_d=[r[3] for r in results],
        wall_time=time.perf_counter() - t0,
    )
