import functools
import time

import pytest

from mazenav.harness.corpus import BUILDERS, corpus
from mazenav.harness.simulate import run_simulation

# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES: list = []


@functools.lru_cache(maxsize=None)
def cached_run(name: str, policy: str = "basic", dt: float | None = None, seed: int = 0,
               sigma0: int | None = None):
    """Simulate a corpus scenario once per session; wall time goes to ``extras``."""
    kw = {"policy": policy}
    if sigma0 is not None:
        kw["sigma0"] = sigma0
    sc = BUILDERS[name](**kw)
    t0 = time.perf_counter()
    rec = run_simulation(sc, seed=seed, dt=dt)
    rec.extras["wall_time"] = time.perf_counter() - t0
    return rec


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def scenarios():
    return corpus()


@pytest.fixture(scope="session")
def run_of():
    return cached_run


@pytest.fixture
def circle_sc():
    return BUILDERS["circle"]()


@pytest.fixture
def u_obstacle():
    from mazenav.harness.corpus import u_maze_obstacle
    return u_maze_obstacle()
