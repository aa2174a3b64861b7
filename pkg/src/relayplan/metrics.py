"""Throughput / outage metrics, seed aggregation and report files."""

from __future__ import annotations

import csv
import json
import math
from collections import defaultdict
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Iterable, Literal, Sequence

import numpy as np

from .assignment import MHZ, Solution
from .channel import RadioParams
from .objective import LinkRates, compute_link_rates
from .scenario import Scenario

METRICS = ("avg_fen_throughput", "fen_throughput_sum", "backhaul_throughput", "fen_outage", "backhaul_outage")
GroupBy = Literal["E", "total_min_rate"]


@dataclass(frozen=True)
class RunReport:
    solver: str
    seed: int
    E: int
    total_min_rate: float  # bit/s
    avg_fen_throughput: float  # bit/s per FEN link
    fen_throughput_sum: float  # bit/s, all FEN links
    backhaul_throughput: float  # bit/s
    fen_outage: float
    backhaul_outage: float
    replicate: int = 0
    hap_x: float = 0.0
    hap_y: float = 0.0
    hap_z: float = 0.0
    fen_bw_mhz: str = ""
    backhaul_bw_mhz: int = 0
    raw_utility: float = 0.0
    penalized_utility: float = 0.0
    p_f: float = 0.0


@dataclass(frozen=True)
class AggregateStats:
    mean: float
    std: float
    count: int


def outages(rates: LinkRates, min_rates: Sequence[float]) -> tuple[float, float]:
    """(FEN outage, backhaul outage) as violation fractions."""
    fen = rates.fen_rates
    fen_out = int((fen < np.asarray(min_rates)[:, None]).sum()) / fen.size
    bkh_out = int((fen.sum(axis=0) > rates.backhaul_rates).sum()) / fen.shape[1]
    return fen_out, bkh_out


def evaluate_solution(scenario: Scenario, solution: Solution, radio: RadioParams, solver: str = "", **extra) -> RunReport:
    rates = compute_link_rates(scenario, solution, radio)
    n, e = scenario.period_count, scenario.fen_count
    fen_sum = float(rates.fen_rates.sum() / n)
    fen_out, bkh_out = outages(rates, scenario.min_rates)
    a = solution.assignment
    return RunReport(
        solver=solver,
        seed=scenario.seed,
        E=e,
        total_min_rate=scenario.total_min_rate,
        avg_fen_throughput=fen_sum / e,
        fen_throughput_sum=fen_sum,
        backhaul_throughput=float(rates.backhaul_rates.mean()),
        fen_outage=fen_out,
        backhaul_outage=bkh_out,
        hap_x=solution.hap_pos.x,
        hap_y=solution.hap_pos.y,
        hap_z=solution.hap_pos.z,
        fen_bw_mhz=";".join(str(int(round(b / MHZ))) for b in a.fen_bw),
        backhaul_bw_mhz=int(round(a.backhaul_bw / MHZ)),
        **extra,
    )


def stats(values: Sequence[float]) -> AggregateStats:
    if len(values) == 0:
        raise ValueError("cannot aggregate an empty group")
    arr = np.asarray(values, dtype=float)
    std = float(arr.std(ddof=1)) if len(arr) > 1 else 0.0
    return AggregateStats(float(arr.mean()), std, len(arr))


def aggregate(
    reports: Iterable[RunReport], group_by: GroupBy | None = None
) -> dict[str, dict[object, dict[str, AggregateStats]]]:
    """Mean and sample std of every metric per solver and group.

    Grouping by ``E`` pools all requirement levels, and vice versa. With
    ``group_by=None`` each solver has a single ``"all"`` group.
    """
    groups: dict[str, dict[object, list[RunReport]]] = defaultdict(lambda: defaultdict(list))
    for r in reports:
        key = "all" if group_by is None else getattr(r, group_by)
        groups[r.solver][key].append(r)
    if not groups:
        raise ValueError("cannot aggregate an empty report list")
    return {
        solver: {
            key: {m: stats([getattr(r, m) for r in rows]) for m in METRICS}
            for key, rows in sorted(by_key.items())
        }
        for solver, by_key in sorted(groups.items())
    }


def aggregates_document(reports: Sequence[RunReport]) -> dict:
    def encode(table):
        return {
            solver: {str(k): {m: asdict(s) for m, s in cell.items()} for k, cell in by_key.items()}
            for solver, by_key in table.items()
        }

    return {
        "overall": encode(aggregate(reports)),
        "by_E": encode(aggregate(reports, "E")),
        "by_total_min_rate": encode(aggregate(reports, "total_min_rate")),
    }


# -- files ---------------------------------------------------------------------------

CSV_COLUMNS = [f.name for f in fields(RunReport)]


def sort_key(r: RunReport) -> tuple:
    return (r.E, r.total_min_rate, r.replicate, r.seed, r.solver)


def write_runs_csv(reports: Iterable[RunReport], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=CSV_COLUMNS, lineterminator="\n")
        w.writeheader()
        for r in sorted(reports, key=sort_key):
            w.writerow(asdict(r))


def read_runs_csv(path: str | Path) -> list[RunReport]:
    types = {f.name: f.type for f in fields(RunReport)}
    casts = {"str": str, "int": int, "float": float}
    out = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = set(CSV_COLUMNS) - set(reader.fieldnames or ())
        if missing:
            raise ValueError(f"{path}: missing columns {sorted(missing)}")
        for row in reader:
            out.append(RunReport(**{k: casts[types[k]](row[k]) for k in CSV_COLUMNS}))
    return out


def write_aggregates_json(reports: Sequence[RunReport], path: str | Path) -> None:
    Path(path).write_text(json.dumps(aggregates_document(reports), indent=2, sort_keys=True) + "\n")


def _fmt(s: AggregateStats) -> str:
    return f"{s.mean:.3g} ± {s.std:.2g}"


def summary_text(reports: Sequence[RunReport]) -> str:
    lines = []
    header = f"{'solver':<10} {'n':>4}  {'backhaul thp':>20}  {'avg FEN thp':>20}  {'backhaul outage':>18}  {'FEN outage':>18}"
    lines.append("Overall (mean ± std over all runs)")
    lines.append(header)
    for solver, by_key in aggregate(reports).items():
        c = by_key["all"]
        lines.append(
            f"{solver:<10} {c['fen_outage'].count:>4}  {_fmt(c['backhaul_throughput']):>20}  "
            f"{_fmt(c['avg_fen_throughput']):>20}  {_fmt(c['backhaul_outage']):>18}  {_fmt(c['fen_outage']):>18}"
        )
    for group, label in (("E", "E"), ("total_min_rate", "total min rate (bit/s)")):
        table = aggregate(reports, group)
        lines.append("")
        lines.append(f"By {label}: FEN outage / backhaul outage / avg FEN thp")
        for solver, by_key in table.items():
            for key, c in by_key.items():
                k = f"{key:g}" if isinstance(key, float) else str(key)
                lines.append(
                    f"  {solver:<10} {k:>10}  {_fmt(c['fen_outage']):>16}  "
                    f"{_fmt(c['backhaul_outage']):>16}  {_fmt(c['avg_fen_throughput']):>18}"
                )
    return "\n".join(lines) + "\n"


def improvement(baseline: float, candidate: float, higher_is_better: bool = False) -> float:
    """Relative improvement of ``candidate`` over ``baseline`` (0.32 = 32%)."""
    if baseline == 0:
        return 0.0 if candidate == 0 else math.nan
    delta = (candidate - baseline) if higher_is_better else (baseline - candidate)
    return delta / abs(baseline)
