"""Command line entry point: ``relayplan gen|solve|sweep|report``.

Exit codes: 0 success, 1 configuration/input error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import asdict
from pathlib import Path

from .assignment import EnumerationError
from .config import ConfigError, load_config
from .experiment import run_experiment
from .metrics import evaluate_solution, read_runs_csv, summary_text, write_aggregates_json
from .scenario import ScenarioError, generate_scenario, load_scenario, save_scenario
from .solvers import SOLVERS, run_solver

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2

log = logging.getLogger("relayplan")


def _overrides(args: argparse.Namespace) -> dict:
    o = {}
    if getattr(args, "solvers", None):
        o["solvers"] = [s.strip() for s in args.solvers.split(",") if s.strip()]
    if getattr(args, "seeds", None):
        o["sweep.seeds"] = args.seeds
    if getattr(args, "parallel", None):
        o["parallel"] = args.parallel
    if getattr(args, "trace", False):
        o["trace"] = True
    if getattr(args, "strict_des", False):
        o["strict_des"] = True
    if getattr(args, "out", None):
        o["out"] = args.out
    if getattr(args, "s_max", None) is not None:
        o["sa.s_max"] = args.s_max
    return o


def cmd_gen(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    scenario = generate_scenario(
        seed=args.seed,
        e=args.fens,
        total_min_rate=args.total_min_rate,
        zone=cfg.zone_obj(),
        time=cfg.time_grid(),
        speed=cfg.speed if args.speed is None else args.speed,
        backhaul_pos=cfg.backhaul_pos(),
        d_min=cfg.d_min,
        split=args.split or cfg.split,
    )
    save_scenario(scenario, args.output)
    print(f"wrote {args.output} (E={scenario.fen_count}, N={scenario.period_count}, seed={scenario.seed})")
    return EXIT_OK


def cmd_solve(args: argparse.Namespace) -> int:
    cfg = load_config(args.config, _overrides(args))
    scenario = load_scenario(args.scenario)
    radio, channels = cfg.radio_params(), cfg.channel_set()
    result = run_solver(
        args.solver, scenario, radio, channels, sa=cfg.sa_params(args.solver, args.seed), des=cfg.des_params()
    )
    report = evaluate_solution(scenario, result.best, radio, solver=args.solver)
    doc = {
        "solver": args.solver,
        "hap_pos": list(result.best.hap_pos),
        "assignment_mhz": result.best.assignment.labeled_mhz(),
        "breakdown": result.best_breakdown.to_dict(),
        "iterations_run": result.iterations_run,
        "report": asdict(report),
    }
    print(json.dumps(doc, indent=2))
    if result.trace:
        out = Path(cfg.out)
        out.mkdir(parents=True, exist_ok=True)
        path = out / f"trace_{args.solver}.jsonl"
        with open(path, "w") as fh:
            for rec in result.trace:
                fh.write(json.dumps(asdict(rec)) + "\n")
        print(f"trace written to {path}", file=sys.stderr)
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    cfg = load_config(args.config, _overrides(args))
    reports = run_experiment(cfg)
    print(summary_text(reports), end="")
    print(f"{len(reports)} runs written to {cfg.out}", file=sys.stderr)
    return EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    runs = Path(args.runs)
    if runs.is_dir():
        runs = runs / "runs.csv"
    if not runs.exists():
        raise FileNotFoundError(f"{runs} not found")
    reports = read_runs_csv(runs)
    out = Path(args.out) if args.out else runs.parent
    out.mkdir(parents=True, exist_ok=True)
    write_aggregates_json(reports, out / "aggregates.json")
    text = summary_text(reports)
    (out / "summary.txt").write_text(text)
    print(text, end="")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="relayplan", description="HAP placement and channel assignment simulator")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a scenario file")
    g.add_argument("--config", help="experiment config supplying zone/time/radio defaults")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--fens", type=int, default=3)
    g.add_argument("--total-min-rate", type=float, default=450e6, help="bit/s")
    g.add_argument("--speed", type=float, help="FEN speed, m/s")
    g.add_argument("--split", choices=["random", "equal"])
    g.add_argument("-o", "--output", required=True)
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", help="run one solver on one scenario")
    s.add_argument("--scenario", required=True)
    s.add_argument("--solver", choices=SOLVERS, default="safnet")
    s.add_argument("--config")
    s.add_argument("--seed", type=int, default=0, help="solver RNG seed")
    s.add_argument("--s-max", type=int)
    s.add_argument("--trace", action="store_true")
    s.add_argument("--out")
    s.set_defaults(func=cmd_solve)

    w = sub.add_parser("sweep", help="run the full experiment grid")
    w.add_argument("--config")
    w.add_argument("--out")
    w.add_argument("--solvers", help="comma-separated subset of " + ",".join(SOLVERS))
    w.add_argument("--seeds", help="replicates, e.g. 0:100 or 1,2,3")
    w.add_argument("--parallel", type=int)
    w.add_argument("--trace", action="store_true")
    w.add_argument("--strict-des", action="store_true")
    w.add_argument("--s-max", type=int)
    w.set_defaults(func=cmd_sweep)

    r = sub.add_parser("report", help="re-aggregate an existing runs.csv")
    r.add_argument("runs", help="runs.csv or the directory containing it")
    r.add_argument("--out")
    r.set_defaults(func=cmd_report)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (ConfigError, ScenarioError, FileNotFoundError) as exc:
        log.error("%s", exc)
        return EXIT_CONFIG
    except (EnumerationError, RuntimeError, ValueError) as exc:
        log.error("%s", exc)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
