"""HAP placement and bandwidth assignment solvers.

* :func:`conventional_heuristic` - proportional bandwidth shares and a
  rate-weighted centroid.
* :func:`simulated_annealing` - linear-cooling SA started from the
  heuristic. ``fitness_mode="raw"`` scores the bare weighted sum-rate
  (conventional SA); ``"penalized"`` scores the penalized utility and draws
  assignments from the budget-pruned list (SAFnet).
* :func:`exhaustive_search` - every grid point times every assignment.

Random draws per SA iteration, in order: three uniforms in [-1, 1) for the
position step, one integer index into the candidate list, one uniform in
[0, 1) for the acceptance test. All come from
``numpy.random.default_rng(params.rng_seed)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Literal

import numpy as np

from .assignment import (
    ENUMERATION_CAP,
    BandwidthAssignment,
    ChannelSet,
    EnumerationError,
    Solution,
    assignment_matrix,
    prune_matrix,
    round_down_to_channel,
)
from .channel import GeometryError, RadioParams
from .objective import Evaluator, PenaltyBreakdown
from .scenario import Scenario, Vec3, Zone

FitnessMode = Literal["raw", "penalized"]
SOLVERS = ("heuristic", "conv_sa", "safnet", "des")


@dataclass(frozen=True)
class SaParams:
    t_max: float = 1e8
    s_max: int = 10_000
    step: float = 5.0  # max per-coordinate move, m
    beta: float = 0.8
    rng_seed: int = 0
    prune: bool | None = None  # None: prune only in penalized mode
    grid_step: float | None = None  # score positions snapped to this lattice
    trace: bool = False

    def __post_init__(self) -> None:
        if not self.t_max > 0:
            raise ValueError(f"t_max must be positive, got {self.t_max}")
        if self.s_max < 0:
            raise ValueError(f"s_max must be >= 0, got {self.s_max}")
        if not self.step > 0:
            raise ValueError(f"step must be positive, got {self.step}")
        if not 0 < self.beta <= 1:
            raise ValueError(f"beta must be in (0, 1], got {self.beta}")
        if self.grid_step is not None and not self.grid_step > 0:
            raise ValueError(f"grid_step must be positive, got {self.grid_step}")


@dataclass(frozen=True)
class DesParams:
    grid_step: float = 10.0
    cap: int = ENUMERATION_CAP

    def __post_init__(self) -> None:
        if not self.grid_step > 0:
            raise ValueError(f"grid_step must be positive, got {self.grid_step}")


@dataclass(frozen=True)
class TraceRecord:
    iteration: int
    fitness: float  # candidate's solver fitness
    p_f: float
    accepted: bool
    bandwidth_total: float


@dataclass
class SolverResult:
    solver: str
    best: Solution
    best_breakdown: PenaltyBreakdown
    fitness: float
    iterations_run: int
    trace: list[TraceRecord] = field(default_factory=list)


# -- Conventional heuristic ---------------------------------------------------------


def conventional_heuristic(scenario: Scenario, channels: ChannelSet) -> Solution:
    mins = scenario.min_rates
    tau_bh = float(mins.sum())
    tau_total = tau_bh + float(mins.sum())
    budget = channels.budget
    backhaul_bw = round_down_to_channel(budget * tau_bh / tau_total, channels)
    fen_bw = tuple(round_down_to_channel(budget * t / tau_total, channels) for t in mins)

    per_period = tau_bh * np.asarray(scenario.backhaul_pos) + (mins[:, None, None] * scenario.positions).sum(axis=0)
    centroid = per_period.mean(axis=0) / (tau_bh + float(mins.sum()))
    return Solution(scenario.zone.clamp(centroid), BandwidthAssignment(fen_bw, backhaul_bw))


# -- SA building blocks -------------------------------------------------------------


def cooling_temperature(s: int, params: SaParams) -> float:
    """Linear schedule from ``t_max`` at ``s = 0`` down to 0 at ``s = s_max``."""
    if params.s_max == 0:
        return 0.0
    return params.t_max * (params.s_max - s) / params.s_max


def metropolis_accept(delta: float, t: float, r: float) -> bool:
    if math.isnan(delta):
        return False
    if t <= 0:
        return delta > 0
    if delta >= 0:
        return True
    return r < math.exp(delta / t)


def snap_to_grid(pos: np.ndarray, grid_step: float, zone: Zone) -> np.ndarray:
    """Nearest lattice point ``i * grid_step`` inside the zone, per coordinate."""
    top = np.floor(zone.upper / grid_step + 1e-9)
    idx = np.clip(np.round(np.asarray(pos) / grid_step), 0, top)
    return idx * grid_step


def neighbour(
    current: Solution,
    candidates: np.ndarray,
    params: SaParams,
    zone: Zone,
    fitness: Callable[[np.ndarray, np.ndarray], float],
    rng: np.random.Generator,
) -> tuple[Solution, float]:
    """Propose a neighbour of ``current`` and return it with its fitness.

    The HAP moves by up to ``params.step`` per coordinate and is clamped back
    into the zone. One assignment is drawn from ``candidates``; it replaces
    the current one only if it scores at least as well at the new position.
    """
    pos, bw, f = _propose(
        np.asarray(current.hap_pos), current.assignment.as_array(), candidates, params.step, zone.upper, fitness, rng
    )
    return Solution(Vec3(*pos.tolist()), BandwidthAssignment.from_array(bw.tolist())), f


def _propose(pos, bw, candidates, step, upper, fitness, rng):
    if len(candidates) == 0:
        raise ValueError("empty candidate assignment list")
    new_pos = np.clip(pos + rng.uniform(-1.0, 1.0, size=3) * step, 0.0, upper)
    cand = candidates[rng.integers(len(candidates))]
    f_cand = fitness(new_pos, cand)
    if np.array_equal(cand, bw):
        return new_pos, bw, f_cand
    f_keep = fitness(new_pos, bw)
    if f_cand >= f_keep:
        return new_pos, cand, f_cand
    return new_pos, bw, f_keep


def candidate_list(scenario: Scenario, channels: ChannelSet, params: SaParams, fitness_mode: FitnessMode) -> np.ndarray:
    full = assignment_matrix(scenario.fen_count, channels)
    prune = params.prune if params.prune is not None else fitness_mode == "penalized"
    return prune_matrix(full, channels.budget, params.beta) if prune else full


# -- Simulated annealing ----------------------------------------------------------


def simulated_annealing(
    scenario: Scenario,
    radio: RadioParams,
    channels: ChannelSet,
    params: SaParams,
    fitness_mode: FitnessMode = "penalized",
    candidates: np.ndarray | None = None,
) -> SolverResult:
    if fitness_mode not in ("raw", "penalized"):
        raise ValueError(f"unknown fitness_mode {fitness_mode!r}")
    penalized = fitness_mode == "penalized"
    ev = Evaluator(scenario, radio, channels)
    zone = scenario.zone
    if candidates is None:
        candidates = candidate_list(scenario, channels, params, fitness_mode)

    if params.grid_step is None:
        def where(p):
            return p
    else:
        def where(p):
            return snap_to_grid(p, params.grid_step, zone)

    def fit(p, b):
        return ev.fitness(where(p), b, penalized)

    rng = np.random.default_rng(params.rng_seed)
    start = conventional_heuristic(scenario, channels)
    pos = where(np.asarray(start.hap_pos, dtype=float))
    bw = start.assignment.as_array()
    if not (candidates == bw).all(axis=1).any():
        # keep every visited assignment inside the candidate list
        bw = candidates[int(np.argmax([fit(pos, c) for c in candidates]))]
    f_cur = fit(pos, bw)
    best_pos, best_bw, best_f = pos, bw, f_cur
    trace: list[TraceRecord] = []

    for s in range(params.s_max):
        t = cooling_temperature(s, params)
        new_pos, new_bw, f_new = _propose(pos, bw, candidates, params.step, zone.upper, fit, rng)
        accepted = metropolis_accept(f_new - f_cur, t, rng.random())
        if accepted:
            pos, bw, f_cur = new_pos, new_bw, f_new
        if f_new > best_f:
            best_pos, best_bw, best_f = where(new_pos), new_bw, f_new
        if params.trace:
            try:
                p_f = ev.breakdown(where(new_pos), new_bw).p_f
            except GeometryError:
                p_f = math.nan
            trace.append(TraceRecord(s, f_new, p_f, accepted, float(new_bw.sum())))

    best = Solution(Vec3(*np.asarray(best_pos, dtype=float).tolist()), BandwidthAssignment.from_array(best_bw.tolist()))
    return SolverResult(
        solver="safnet" if penalized else "conv_sa",
        best=best,
        best_breakdown=ev.breakdown(best.hap_pos, best_bw),
        fitness=best_f,
        iterations_run=params.s_max,
        trace=trace,
    )


def calibrate_t_max(
    scenario: Scenario,
    radio: RadioParams,
    channels: ChannelSet,
    params: SaParams,
    fitness_mode: FitnessMode = "penalized",
    target: tuple[float, float] = (0.78, 0.82),
    probes: int = 200,
    max_rounds: int = 40,
) -> float:
    """Bisect (in log space) a constant temperature giving the target acceptance rate."""
    penalized = fitness_mode == "penalized"
    ev = Evaluator(scenario, radio, channels)
    candidates = candidate_list(scenario, channels, params, fitness_mode)
    start = conventional_heuristic(scenario, channels)
    upper = scenario.zone.upper

    def rate(t: float) -> float:
        rng = np.random.default_rng(params.rng_seed)
        pos, bw = np.asarray(start.hap_pos, dtype=float), start.assignment.as_array()
        f_cur = ev.fitness(pos, bw, penalized)
        hits = 0
        for _ in range(probes):
            p, b, f = _propose(pos, bw, candidates, params.step, upper, lambda q, c: ev.fitness(q, c, penalized), rng)
            if metropolis_accept(f - f_cur, t, rng.random()):
                pos, bw, f_cur = p, b, f
                hits += 1
        return hits / probes

    lo, hi = math.log(1e-3), math.log(1e15)
    mid = math.log(params.t_max)
    for _ in range(max_rounds):
        mid = 0.5 * (lo + hi)
        r = rate(math.exp(mid))
        if target[0] <= r <= target[1]:
            break
        if r < target[0]:
            lo = mid
        else:
            hi = mid
    return math.exp(mid)


# -- Exhaustive search ---------------------------------------------------------------


def grid_axes(zone: Zone, grid_step: float) -> list[np.ndarray]:
    counts = np.floor(zone.upper / grid_step + 1e-9).astype(int) + 1
    return [np.arange(c) * grid_step for c in counts]


def exhaustive_search(
    scenario: Scenario, radio: RadioParams, channels: ChannelSet, params: DesParams
) -> SolverResult:
    """Best penalized utility over a position grid and all assignments.

    Ties keep the first candidate in (x, y, z, assignment-index) order.
    """
    axes = grid_axes(scenario.zone, params.grid_step)
    n_pos = math.prod(len(a) for a in axes)
    n_assign = len(channels) ** (scenario.fen_count + 1)
    total = n_pos * n_assign
    if total > params.cap:
        raise EnumerationError(f"exhaustive search needs {total} candidate evaluations (cap {params.cap})")
    combos = assignment_matrix(scenario.fen_count, channels, cap=params.cap)
    ev = Evaluator(scenario, radio, channels)

    best_f = -math.inf
    best_pos = best_bw = None
    for x in axes[0]:
        for y in axes[1]:
            for z in axes[2]:
                try:
                    scores = ev.batch((x, y, z), combos)["U"]
                except GeometryError:
                    continue
                k = int(np.argmax(scores))
                if scores[k] > best_f:
                    best_f, best_pos, best_bw = float(scores[k]), (float(x), float(y), float(z)), combos[k]
    if best_pos is None:
        raise GeometryError("no grid position could be evaluated")
    best = Solution(Vec3(*best_pos), BandwidthAssignment.from_array(best_bw.tolist()))
    return SolverResult(
        solver="des",
        best=best,
        best_breakdown=ev.breakdown(best.hap_pos, best_bw),
        fitness=best_f,
        iterations_run=total,
    )


# -- dispatch ------------------------------------------------------------------------


def run_solver(
    name: str,
    scenario: Scenario,
    radio: RadioParams,
    channels: ChannelSet,
    sa: SaParams | None = None,
    des: DesParams | None = None,
) -> SolverResult:
    sa = sa or SaParams()
    if name == "heuristic":
        sol = conventional_heuristic(scenario, channels)
        ev = Evaluator(scenario, radio, channels)
        bd = ev.breakdown(sol.hap_pos, sol.assignment.as_array())
        return SolverResult("heuristic", sol, bd, bd.penalized_utility, 0)
    if name == "conv_sa":
        return simulated_annealing(scenario, radio, channels, sa, "raw")
    if name == "safnet":
        return simulated_annealing(scenario, radio, channels, sa, "penalized")
    if name == "des":
        return exhaustive_search(scenario, radio, channels, des or DesParams())
    raise ValueError(f"unknown solver {name!r}; choose from {', '.join(SOLVERS)}")


def with_seed(params: SaParams, seed: int) -> SaParams:
    return replace(params, rng_seed=seed)
