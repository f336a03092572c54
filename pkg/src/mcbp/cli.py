"""Command line entry point: ``mcbp solve | gen | experiment``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .config import SolverConfig
from .experiment import run_experiment, solve_with
from .generator import GeneratorConfig, generate
from .io import load_instance, save_instance, save_solution
from .model import InvalidInstanceError, from_fixed

EXIT_OK, EXIT_INFEASIBLE, EXIT_TIME_LIMIT, EXIT_INPUT = 0, 2, 3, 4

log = logging.getLogger("mcbp")


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mcbp", description="Branch-and-price for the multi-compartment VRP "
                                "with multiple time windows.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="solve one instance file")
    s.add_argument("--mode", choices=["bnp", "rsbnp", "lh", "oracle"], default="rsbnp")
    s.add_argument("--instance", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--time-limit", type=float)
    s.add_argument("--node-limit", type=int)
    s.add_argument("--threads", type=int, default=1)
    s.add_argument("--kappa", type=float, help="load slack threshold as a fraction of vehicle capacity")
    for res in ("time", "cost", "work", "drive"):
        s.add_argument(f"--eps-{res}", type=float, help=f"aggressive-dominance slack on {res} (input units)")
    s.add_argument("--eps-frac", type=float, help="default slack as a fraction of each resource's range")
    s.add_argument("--cluster-min", type=int)
    s.add_argument("--cluster-max", type=int)
    s.add_argument("--cluster-step", type=float)
    cov = s.add_mutually_exclusive_group()
    cov.add_argument("--covering", dest="covering", action="store_true", default=None)
    cov.add_argument("--partitioning", dest="covering", action="store_false")
    s.add_argument("--log", help="write a per-node search trace (TSV)")
    s.add_argument("--config", help="JSON file with further solver options")

    g = sub.add_parser("gen", help="generate an instance")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--compartments", type=int, default=6)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--horizon", type=int, default=5)
    g.add_argument("--windows-per-day", type=int, default=1)
    g.add_argument("--active-days", type=int)
    g.add_argument("--single-window", action="store_true")
    g.add_argument("--out", required=True)

    e = sub.add_parser("experiment", help="run an experiment spec")
    e.add_argument("--spec", required=True)
    e.add_argument("--out", required=True)
    return p


def _solver_config(args) -> SolverConfig:
    opts = {}
    if args.config:
        opts.update(json.loads(Path(args.config).read_text(encoding="utf-8")))
    direct = {
        "time_limit": args.time_limit, "node_limit": args.node_limit, "kappa_frac": args.kappa,
        "eps_time": args.eps_time, "eps_cost": args.eps_cost, "eps_work": args.eps_work,
        "eps_drive": args.eps_drive, "eps_frac": args.eps_frac, "cluster_min": args.cluster_min,
        "cluster_max": args.cluster_max, "cluster_step": args.cluster_step, "covering": args.covering,
        "log_path": args.log,
    }
    opts.update({k: v for k, v in direct.items() if v is not None})
    opts["threads"] = args.threads
    return SolverConfig.from_dict(opts)


def _solve(args) -> int:
    try:
        inst = load_instance(args.instance)
        config = _solver_config(args)
    except (OSError, ValueError, InvalidInstanceError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        sol = solve_with(args.mode, inst, config)
    except InvalidInstanceError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    save_solution(sol, args.out)
    obj = f"{from_fixed(sol.objective):.3f}" if sol.routes else "-"
    print(f"{sol.status} objective={obj} routes={len(sol.routes)} time={sol.wall_seconds:.2f}s")
    if sol.message:
        print(sol.message)
    if sol.status == "infeasible":
        return EXIT_INFEASIBLE
    if sol.status == "time_limit":
        return EXIT_TIME_LIMIT
    return EXIT_OK


def _gen(args) -> int:
    try:
        cfg = GeneratorConfig(n_clients=args.n, n_compartments=args.compartments, seed=args.seed,
                              horizon_days=args.horizon, windows_per_day=args.windows_per_day,
                              active_days=args.active_days, single_window=args.single_window)
        inst = generate(cfg)
    except ValueError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    save_instance(inst, args.out)
    return EXIT_OK


def _experiment(args) -> int:
    try:
        report = run_experiment(args.spec, args.out)
    except (OSError, ValueError, TypeError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    sys.stdout.write(report["table"])
    return EXIT_OK


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return {"solve": _solve, "gen": _gen, "experiment": _experiment}[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
