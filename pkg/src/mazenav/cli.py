"""Command line interface.

Exit status is 0 on success, 1 when a run fails or a check is violated,
and 2 on I/O or schema errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .controller import POLICIES
from .geometry.frames import default_d_sharp, domain_stats
from .harness.corpus import BUILDERS
from .harness.export import ExportError, export, read_csv
from .harness.montecarlo import monte_carlo
from .harness.scenario import ScenarioError, load_scenario, save_scenario, validate_scenario
from .harness.simulate import run_simulation
from .symbolic import PolygonDomain, non_termination_cap, symbolic_path

OK, FAILED, IO_ERROR = 0, 1, 2


def _write(record, out: str, sc=None) -> None:
    fmt = "svg" if out.lower().endswith(".svg") else "csv"
    export(record, fmt, out, scenario=sc)


def cmd_check(args) -> int:
    sc = load_scenario(args.scenario)
    locks = False if args.no_locks else None
    rep = validate_scenario(sc, check_locks=locks)
    for line in rep.lines():
        print(line)
    return OK if rep.ok else FAILED


def cmd_run(args) -> int:
    sc = load_scenario(args.scenario)
    rec = run_simulation(sc, seed=args.seed, dt=args.dt, t_max=args.tmax, policy=args.policy)
    print(f"{sc.name or Path(args.scenario).stem}: {rec.termination}  "
          f"t = {rec.t[-1]:.6g}  switches = {rec.n_switches}  min_d = {rec.min_d:.6g}")
    for out in args.out or []:
        _write(rec, out, sc)
    return OK if rec.success else FAILED


def cmd_mc(args) -> int:
    sc = load_scenario(args.scenario)
    if args.policy:
        sc = sc.with_policy(args.policy)
    if args.p is not None:
        sc = sc.with_policy(sc.nav.policy, p=args.p)
    summ = monte_carlo(sc, args.n, args.seed, dt=args.dt, t_max=args.tmax, workers=args.workers)
    for line in summ.lines():
        print(line)
    return OK if summ.successes == summ.n else FAILED


def cmd_plot(args) -> int:
    table = read_csv(args.record)
    sc = load_scenario(args.scenario) if args.scenario else None
    export(table, "svg", args.out, scenario=sc)
    return OK


def cmd_symbolic(args) -> int:
    sc = load_scenario(args.scenario)
    dom = PolygonDomain.from_obstacle(sc.obstacle, args.offset)
    stats = domain_stats(sc.obstacle, sc.target,
                         default_d_sharp(sc.obstacle, sc.target, sc.nav.d_trig), args.offset)
    sp = symbolic_path(dom, sc.target, (sc.start.x, sc.start.y), args.first_turn, stats=stats)
    print(f"{sp.termination}  straight moves = {sp.n_smt}  cap = {non_termination_cap(stats)}")
    for out in args.out or []:
        _write(sp, out)
    return OK if sp.success else FAILED


def cmd_corpus(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name, build in BUILDERS.items():
        save_scenario(build(policy=args.policy), out / f"{name}.json")
        print(out / f"{name}.json")
    return OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mazenav", description="Reactive maze navigation toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="validate a scenario file")
    p.add_argument("scenario")
    p.add_argument("--no-locks", action="store_true", help="skip the locked-location test")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("run", help="simulate one run")
    p.add_argument("scenario")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dt", type=float, default=None)
    p.add_argument("--tmax", type=float, default=None)
    p.add_argument("--policy", choices=POLICIES, default=None)
    p.add_argument("--out", action="append", help="CSV or SVG output (repeatable)")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("mc", help="seeded Monte Carlo batch")
    p.add_argument("scenario")
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dt", type=float, default=None)
    p.add_argument("--tmax", type=float, default=None)
    p.add_argument("--policy", choices=POLICIES, default="randomized")
    p.add_argument("--p", type=float, default=None, help="probability of choosing sigma = +1")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_mc)

    p = sub.add_parser("plot", help="render a CSV record as SVG")
    p.add_argument("record")
    p.add_argument("--out", required=True)
    p.add_argument("--scenario", help="scenario file for obstacle and target")
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("symbolic", help="trace the symbolic path")
    p.add_argument("scenario")
    p.add_argument("--first-turn", type=int, choices=(1, -1), required=True)
    p.add_argument("--offset", type=float, default=0.0, help="trace on C(offset)")
    p.add_argument("--out", action="append")
    p.set_defaults(func=cmd_symbolic)

    p = sub.add_parser("corpus", help="write the standard scenarios as files")
    p.add_argument("--out", required=True)
    p.add_argument("--policy", choices=POLICIES, default="basic")
    p.set_defaults(func=cmd_corpus)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ScenarioError, ExportError, OSError, ValueError) as exc:
        # SymbolicPathError is a ValueError: a target inside the domain is a schema problem
        print(f"error: {exc}", file=sys.stderr)
        return IO_ERROR


if __name__ == "__main__":
    sys.exit(main())
