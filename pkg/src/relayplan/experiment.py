"""Monte-Carlo sweeps over (FEN count, total requirement, replicate) cells."""

from __future__ import annotations

import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .assignment import EnumerationError
from .config import ExperimentConfig
from .metrics import RunReport, evaluate_solution, sort_key, summary_text, write_aggregates_json, write_runs_csv
from .scenario import Scenario, generate_scenario
from .solvers import SOLVERS, run_solver

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Cell:
    e: int
    total_min_rate: float
    replicate: int


def derive_seed(*keys: int) -> int:
    """Stable 32-bit seed from integer keys; independent of sweep layout."""
    return int(np.random.SeedSequence([int(k) for k in keys]).generate_state(1)[0])


def cell_seed(master_seed: int, cell: Cell) -> int:
    return derive_seed(master_seed, cell.e, int(cell.total_min_rate), cell.replicate)


def solver_seed(scenario_seed: int, solver: str) -> int:
    return derive_seed(scenario_seed, SOLVERS.index(solver))


def cells(config: ExperimentConfig) -> list[Cell]:
    sw = config.sweep
    return [Cell(e, float(r), k) for e in sw.fens for r in sw.total_min_rates for k in sw.replicates]


def build_scenario(config: ExperimentConfig, cell: Cell) -> Scenario:
    return generate_scenario(
        seed=cell_seed(config.sweep.master_seed, cell),
        e=cell.e,
        total_min_rate=cell.total_min_rate,
        zone=config.zone_obj(),
        time=config.time_grid(),
        speed=config.speed,
        backhaul_pos=config.backhaul_pos(),
        d_min=config.d_min,
        split=config.split,
    )


@dataclass
class CellOutcome:
    reports: list[RunReport]
    traces: dict[str, list[dict]]
    skipped: list[str]


def run_cell(config: ExperimentConfig, cell: Cell) -> CellOutcome:
    scenario = build_scenario(config, cell)
    radio, channels = config.radio_params(), config.channel_set()
    out = CellOutcome([], {}, [])
    for name in config.solvers:
        try:
            result = run_solver(
                name,
                scenario,
                radio,
                channels,
                sa=config.sa_params(name, solver_seed(scenario.seed, name)),
                des=config.des_params(),
            )
        except EnumerationError as exc:
            if config.strict_des:
                raise
            out.skipped.append(f"{name} skipped for E={cell.e} rate={cell.total_min_rate:g} rep={cell.replicate}: {exc}")
            continue
        bd = result.best_breakdown
        out.reports.append(
            evaluate_solution(
                scenario,
                result.best,
                radio,
                solver=name,
                replicate=cell.replicate,
                raw_utility=bd.raw_utility,
                penalized_utility=bd.penalized_utility,
                p_f=bd.p_f,
            )
        )
        if result.trace:
            out.traces[name] = [asdict(t) for t in result.trace]
    return out


def _run_cell_args(args):
    return run_cell(*args)


def run_sweep(config: ExperimentConfig) -> tuple[list[RunReport], list[tuple[Cell, CellOutcome]]]:
    todo = cells(config)
    if config.parallel > 1:
        with ProcessPoolExecutor(max_workers=config.parallel) as pool:
            outcomes = list(pool.map(_run_cell_args, [(config, c) for c in todo]))
    else:
        outcomes = [run_cell(config, c) for c in todo]
    reports = sorted((r for o in outcomes for r in o.reports), key=sort_key)
    return reports, list(zip(todo, outcomes))


def run_experiment(config: ExperimentConfig, out_dir: str | Path | None = None) -> list[RunReport]:
    """Run the full sweep and write runs.csv, aggregates.json and summary.txt."""
    out = Path(out_dir or config.out)
    out.mkdir(parents=True, exist_ok=True)
    reports, outcomes = run_sweep(config)
    for _, o in outcomes:
        for msg in o.skipped:
            log.warning(msg)
    if not reports:
        raise RuntimeError("no solver produced a result")
    write_runs_csv(reports, out / "runs.csv")
    write_aggregates_json(reports, out / "aggregates.json")
    (out / "summary.txt").write_text(summary_text(reports))
    if config.trace:
        tdir = out / "traces"
        tdir.mkdir(exist_ok=True)
        for cell, o in outcomes:
            for solver, records in o.traces.items():
                name = f"{solver}_E{cell.e}_R{int(cell.total_min_rate)}_rep{cell.replicate}.jsonl"
                with open(tdir / name, "w") as fh:
                    for rec in records:
                        fh.write(json.dumps(rec) + "\n")
    return reports
