"""Weighted sum-rate utility and constraint penalties.

The penalized utility is ``U = u - p_f * u`` where ``u`` is the weighted,
time-averaged FEN rate and ``p_f`` adds up four violation terms:

* ``c_d``   1 if the HAP comes within ``d_min`` of any FEN (inclusive).
* ``c_bw``  1 if the assigned bandwidth exceeds the budget (strictly).
* ``c_min`` 1/(N*E) per (FEN, period) pair below its minimum rate.
* ``c_bkh`` 1/N per period whose FEN sum-rate exceeds the backhaul rate.

:class:`Evaluator` is the vectorized path used by the solvers.
:func:`penalized_utility_incremental` is the literal per-period loop and
exists to cross-check it.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from .assignment import BandwidthAssignment, ChannelSet, Solution
from .channel import D_FLOOR, GeometryError, RadioParams, link_capacity, path_loss
from .scenario import Scenario, distance

_MAX_BATCH_ELEMENTS = 2_000_000


@dataclass(frozen=True, eq=False)
class LinkRates:
    fen_rates: np.ndarray  # (E, N) bit/s
    backhaul_rates: np.ndarray  # (N,) bit/s


@dataclass(frozen=True)
class PenaltyBreakdown:
    c_d: int
    c_bw: int
    c_min_total: float
    c_bkh_total: float
    p_f: float
    raw_utility: float
    penalized_utility: float

    @property
    def feasible(self) -> bool:
        return self.p_f == 0

    def to_dict(self) -> dict:
        return asdict(self)


# -- individual terms -----------------------------------------------------------


def raw_utility(rates: LinkRates, weights: Sequence[float]) -> float:
    """Weighted sum of FEN rates, averaged over periods. Backhaul excluded."""
    w = np.asarray(weights, dtype=float)
    n = rates.fen_rates.shape[1]
    return float((rates.fen_rates.sum(axis=-1) * w).sum() / n)


def penalty_distance(scenario: Scenario, hap_pos: Sequence[float]) -> int:
    diff = scenario.positions - np.asarray(hap_pos, dtype=float)
    d = np.sqrt((diff * diff).sum(axis=-1))
    return int(np.any(d <= scenario.d_min))


def penalty_bandwidth(assignment: BandwidthAssignment, budget: float) -> int:
    return int(assignment.total > budget)


def penalty_min_rate(rates: LinkRates, min_rates: Sequence[float]) -> float:
    fen = rates.fen_rates
    violations = int((fen < np.asarray(min_rates, dtype=float)[:, None]).sum())
    return violations / fen.size


def penalty_backhaul(rates: LinkRates) -> float:
    fen_sum = rates.fen_rates.sum(axis=0)
    return int((fen_sum > rates.backhaul_rates).sum()) / fen_sum.size


# -- vectorized evaluation ---------------------------------------------------------


class Evaluator:
    """Scores HAP positions and bandwidth assignments for one scenario.

    Geometry (distances and gains) is cached for the most recent position, so
    scoring several assignments at the same point costs one distance pass.
    """

    def __init__(self, scenario: Scenario, radio: RadioParams, channels: ChannelSet | None = None):
        self.scenario = scenario
        self.radio = radio
        self.budget = channels.budget if channels is not None else np.inf
        self.fen_pos = scenario.positions
        self.backhaul = np.asarray(scenario.backhaul_pos, dtype=float)
        self.weights = scenario.weights
        self.min_rates = scenario.min_rates
        self.e = scenario.fen_count
        self.n = scenario.period_count
        self._cache_key: tuple | None = None
        self._cache: tuple | None = None

    def geometry(self, hap_pos: Sequence[float]) -> tuple[np.ndarray, float, int]:
        """Return (FEN gains (E, N), backhaul gain, c_d) for a HAP position."""
        key = tuple(float(c) for c in hap_pos)
        if key == self._cache_key:
            return self._cache
        hap = np.asarray(key)
        diff = self.fen_pos - hap
        d = np.sqrt((diff * diff).sum(axis=-1))
        db = np.asarray(distance(self.backhaul, hap))
        if d.min() < D_FLOOR or db < D_FLOOR:
            raise GeometryError(f"HAP at {key} within {D_FLOOR} m of a node")
        lam = self.radio.wavelength
        result = (path_loss(d, lam), float(path_loss(db, lam)), int(np.any(d <= self.scenario.d_min)))
        self._cache_key, self._cache = key, result
        return result

    def _rates(self, gains: np.ndarray, gb: float, bw: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        p, n0 = self.radio.tx_power, self.radio.noise_psd
        fen_bw = bw[:, : self.e, None]
        fen = fen_bw * np.log2(1.0 + p * gains / (fen_bw * n0))
        bb = bw[:, self.e]
        bkh = bb * np.log2(1.0 + p * gb / (bb * n0))
        return fen, bkh

    def batch(self, hap_pos: Sequence[float], bw: np.ndarray) -> dict[str, np.ndarray]:
        """Score many assignments (rows of ``bw``) at one position."""
        bw = np.atleast_2d(np.asarray(bw, dtype=float))
        gains, gb, c_d = self.geometry(hap_pos)
        chunk = max(1, _MAX_BATCH_ELEMENTS // (self.e * self.n))
        parts = [self._score(gains, gb, c_d, bw[i : i + chunk]) for i in range(0, len(bw), chunk)]
        if len(parts) == 1:
            return parts[0]
        return {k: np.concatenate([p[k] for p in parts]) for k in parts[0]}

    def _score(self, gains, gb, c_d, bw) -> dict[str, np.ndarray]:
        fen, bkh = self._rates(gains, gb, bw)
        u = (fen.sum(axis=-1) * self.weights).sum(axis=-1) / self.n
        c_min = (fen < self.min_rates[:, None]).sum(axis=(1, 2)) / (self.n * self.e)
        c_bkh = (fen.sum(axis=1) > bkh[:, None]).sum(axis=-1) / self.n
        c_bw = (bw.sum(axis=-1) > self.budget).astype(int)
        p_f = c_d + c_bw + c_min + c_bkh
        return {
            "c_d": np.full(len(bw), c_d),
            "c_bw": c_bw,
            "c_min": c_min,
            "c_bkh": c_bkh,
            "p_f": p_f,
            "u": u,
            "U": u - p_f * u,
        }

    def breakdown(self, hap_pos: Sequence[float], bw: Sequence[float]) -> PenaltyBreakdown:
        s = self.batch(hap_pos, np.asarray(bw, dtype=float)[None, :])
        return PenaltyBreakdown(
            c_d=int(s["c_d"][0]),
            c_bw=int(s["c_bw"][0]),
            c_min_total=float(s["c_min"][0]),
            c_bkh_total=float(s["c_bkh"][0]),
            p_f=float(s["p_f"][0]),
            raw_utility=float(s["u"][0]),
            penalized_utility=float(s["U"][0]),
        )

    def fitness(self, hap_pos: Sequence[float], bw: Sequence[float], penalized: bool = True) -> float:
        """Solver fitness; ``-inf`` where the geometry cannot be evaluated."""
        try:
            s = self.batch(hap_pos, np.asarray(bw, dtype=float)[None, :])
        except GeometryError:
            return float("-inf")
        return float(s["U"][0] if penalized else s["u"][0])

    def link_rates(self, hap_pos: Sequence[float], bw: Sequence[float]) -> LinkRates:
        gains, gb, _ = self.geometry(hap_pos)
        fen, bkh = self._rates(gains, gb, np.asarray(bw, dtype=float)[None, :])
        return LinkRates(fen_rates=fen[0], backhaul_rates=np.full(self.n, bkh[0]))


def compute_link_rates(scenario: Scenario, solution: Solution, radio: RadioParams) -> LinkRates:
    return Evaluator(scenario, radio).link_rates(solution.hap_pos, solution.assignment.as_array())


def penalized_utility(
    scenario: Scenario, solution: Solution, radio: RadioParams, channels: ChannelSet
) -> PenaltyBreakdown:
    solution.check(channels)
    return Evaluator(scenario, radio, channels).breakdown(solution.hap_pos, solution.assignment.as_array())


def penalized_utility_incremental(
    scenario: Scenario, solution: Solution, radio: RadioParams, channels: ChannelSet
) -> PenaltyBreakdown:
    """Per-period accumulation of utility and penalty factor, scalar by scalar."""
    solution.check(channels)
    n_periods, e = scenario.period_count, scenario.fen_count
    hap = solution.hap_pos
    fen_bw = solution.assignment.fen_bw
    bkh_bw = solution.assignment.backhaul_bw

    u = 0.0
    p_f = 0.0
    c_d = penalty_distance(scenario, hap)
    c_bw = penalty_bandwidth(solution.assignment, channels.budget)
    p_f += c_d
    p_f += c_bw
    c_min = c_bkh = 0.0
    for n in range(n_periods):
        tau_bh = link_capacity(scenario.backhaul_pos, hap, bkh_bw, radio)
        fen_sum = 0.0
        for j in range(e):
            fen = scenario.fens[j]
            tau = link_capacity(fen.trajectory[n], hap, fen_bw[j], radio)
            if tau < fen.min_rate:
                p_f += 1.0 / (n_periods * e)
                c_min += 1.0 / (n_periods * e)
            u += fen.weight * tau / n_periods
            fen_sum += tau
        if fen_sum > tau_bh:
            p_f += 1.0 / n_periods
            c_bkh += 1.0 / n_periods
    return PenaltyBreakdown(c_d, c_bw, c_min, c_bkh, p_f, u, u - p_f * u)
