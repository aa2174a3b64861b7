"""Mission world: coverage zone, timeline, FEN trajectories and QoS demands.

Scenarios are immutable. Trajectory arrays are stored read-only so a
scenario can be shared between solver runs without copying.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Literal, NamedTuple, Sequence

import numpy as np

RATE_GRANULARITY = 1e6  # bit/s

Split = Literal["random", "equal"]


class ScenarioError(ValueError):
    """Raised when a scenario (or scenario file) violates an invariant."""


class Vec3(NamedTuple):
    x: float
    y: float
    z: float


def vec3(value: Sequence[float], name: str = "position") -> Vec3:
    if len(value) != 3:
        raise ScenarioError(f"{name}: expected 3 components, got {len(value)}")
    v = Vec3(float(value[0]), float(value[1]), float(value[2]))
    if not all(math.isfinite(c) for c in v):
        raise ScenarioError(f"{name}: components must be finite, got {tuple(v)}")
    return v


def distance(a: Sequence[float], b: Sequence[float]) -> float:
    """Euclidean distance between two points."""
    return math.sqrt((a[0] - b[0]) ** 2 + (a[1] - b[1]) ** 2 + (a[2] - b[2]) ** 2)


@dataclass(frozen=True)
class Zone:
    size: Vec3

    def __post_init__(self) -> None:
        object.__setattr__(self, "size", vec3(self.size, "zone"))
        x, y, z = self.size
        if x <= 0 or y <= 0:
            raise ScenarioError(f"zone: horizontal dimensions must be positive, got {tuple(self.size)}")
        if z < 0:
            raise ScenarioError(f"zone: height must be non-negative, got {z}")

    @property
    def upper(self) -> np.ndarray:
        return np.asarray(self.size, dtype=float)

    def contains(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        return np.all((points >= 0.0) & (points <= self.upper), axis=-1)

    def clamp(self, point: Sequence[float]) -> Vec3:
        """Closest point of the zone to ``point``."""
        p = np.clip(np.asarray(point, dtype=float), 0.0, self.upper)
        return Vec3(*p.tolist())


@dataclass(frozen=True)
class TimeGrid:
    horizon: float
    period: float

    def __post_init__(self) -> None:
        if not (self.period > 0 and math.isfinite(self.period)):
            raise ScenarioError(f"time.period must be positive, got {self.period}")
        if not (self.horizon > 0 and math.isfinite(self.horizon)):
            raise ScenarioError(f"time.horizon must be positive, got {self.horizon}")
        ratio = self.horizon / self.period
        if abs(ratio - round(ratio)) > 1e-9 * max(1.0, ratio):
            raise ScenarioError(
                f"time: horizon {self.horizon} is not an integer multiple of period {self.period}"
            )
        if round(ratio) < 1:
            raise ScenarioError("time: horizon yields zero periods")

    @property
    def count(self) -> int:
        return int(round(self.horizon / self.period))


@dataclass(frozen=True, eq=False)
class FenSpec:
    trajectory: np.ndarray  # (N, 3)
    weight: float
    min_rate: float  # bit/s

    def __post_init__(self) -> None:
        traj = np.array(self.trajectory, dtype=float)
        if traj.ndim != 2 or traj.shape[1] != 3:
            raise ScenarioError(f"trajectory must have shape (N, 3), got {traj.shape}")
        traj.setflags(write=False)
        object.__setattr__(self, "trajectory", traj)
        if not self.weight > 0:
            raise ScenarioError(f"weight must be positive, got {self.weight}")
        if not self.min_rate > 0:
            raise ScenarioError(f"min_rate must be positive, got {self.min_rate}")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FenSpec):
            return NotImplemented
        return (
            self.weight == other.weight
            and self.min_rate == other.min_rate
            and np.array_equal(self.trajectory, other.trajectory)
        )


@dataclass(frozen=True, eq=False)
class Scenario:
    zone: Zone
    time: TimeGrid
    fens: tuple[FenSpec, ...]
    backhaul_pos: Vec3
    d_min: float = 1.0
    seed: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "fens", tuple(self.fens))
        object.__setattr__(self, "backhaul_pos", vec3(self.backhaul_pos, "backhaul"))
        if not self.fens:
            raise ScenarioError("fens: at least one FEN is required")
        if not self.d_min > 0:
            raise ScenarioError(f"d_min must be positive, got {self.d_min}")
        n = self.time.count
        for j, fen in enumerate(self.fens):
            if len(fen.trajectory) != n:
                raise ScenarioError(
                    f"fens[{j}].positions: length {len(fen.trajectory)} does not match period count {n}"
                )
            if not np.all(np.isfinite(fen.trajectory)):
                raise ScenarioError(f"fens[{j}].positions: non-finite coordinate")
            outside = ~self.zone.contains(fen.trajectory)
            if outside.any():
                k = int(np.argmax(outside))
                raise ScenarioError(
                    f"fens[{j}].positions[{k}]: point {fen.trajectory[k].tolist()} lies outside the zone"
                )
        total = math.fsum(f.weight for f in self.fens)
        if abs(total - 1.0) > 1e-9:
            raise ScenarioError(f"fens: weights not normalized (sum = {total!r})")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Scenario):
            return NotImplemented
        return (
            self.zone == other.zone
            and self.time == other.time
            and self.backhaul_pos == other.backhaul_pos
            and self.d_min == other.d_min
            and self.seed == other.seed
            and self.fens == other.fens
        )

    @property
    def fen_count(self) -> int:
        return len(self.fens)

    @property
    def period_count(self) -> int:
        return self.time.count

    @cached_property
    def positions(self) -> np.ndarray:
        """FEN positions stacked as an (E, N, 3) array."""
        arr = np.stack([f.trajectory for f in self.fens])
        arr.setflags(write=False)
        return arr

    @cached_property
    def weights(self) -> np.ndarray:
        return np.array([f.weight for f in self.fens])

    @cached_property
    def min_rates(self) -> np.ndarray:
        return np.array([f.min_rate for f in self.fens])

    @property
    def total_min_rate(self) -> float:
        return math.fsum(f.min_rate for f in self.fens)


# -- generation ----------------------------------------------------------------


def _random_waypoint(
    rng: np.random.Generator, upper: np.ndarray, speed: float, period: float, count: int
) -> np.ndarray:
    pos = rng.uniform(0.0, upper)
    target = rng.uniform(0.0, upper)
    out = np.empty((count, 3))
    step = speed * period
    for n in range(count):
        out[n] = pos
        remaining = step
        while remaining > 0.0:
            delta = target - pos
            dist = float(np.sqrt(delta @ delta))
            if dist <= remaining:
                pos = target
                remaining -= dist
                target = rng.uniform(0.0, upper)
            else:
                pos = pos + delta * (remaining / dist)
                remaining = 0.0
    return np.clip(out, 0.0, upper)


def _partition_rates(rng: np.random.Generator, e: int, total: float, split: Split) -> list[float]:
    if split == "equal":
        shares = [total / e] * (e - 1)
    else:
        draws = rng.uniform(0.0, 1.0, size=e)
        spare = total - e * RATE_GRANULARITY
        if spare < 0:
            raise ScenarioError(f"total_min_rate {total} too small to partition across {e} FENs")
        # every FEN gets the floor; the rest is cut at rounded cumulative points
        cuts = np.round(np.cumsum(draws)[:-1] / draws.sum() * spare / RATE_GRANULARITY) * RATE_GRANULARITY
        shares = (RATE_GRANULARITY + np.diff(cuts, prepend=0.0)).tolist()
    last = total - math.fsum(shares)
    if last <= 0:
        raise ScenarioError(f"total_min_rate {total} too small to partition across {e} FENs")
    return [*shares, last]


def generate_scenario(
    seed: int,
    e: int,
    total_min_rate: float,
    zone: Zone,
    time: TimeGrid,
    speed: float = 10.0,
    backhaul_pos: Sequence[float] | None = None,
    d_min: float = 1.0,
    split: Split = "random",
) -> Scenario:
    """Draw a reproducible random scenario.

    Draw order from ``numpy.random.default_rng(seed)``: per FEN, start point
    and random-waypoint targets; then integer weights in 1..5; then the
    requirement shares (``split="random"`` only). ``split="equal"`` gives
    every FEN the same weight and the same share of ``total_min_rate``.
    """
    if e < 1:
        raise ScenarioError(f"e must be >= 1, got {e}")
    if not total_min_rate > 0:
        raise ScenarioError(f"total_min_rate must be positive, got {total_min_rate}")
    if speed < 0:
        raise ScenarioError(f"speed must be non-negative, got {speed}")
    if split not in ("random", "equal"):
        raise ScenarioError(f"split must be 'random' or 'equal', got {split!r}")
    if backhaul_pos is None:
        backhaul_pos = (0.0, zone.size.y / 2, 0.0)

    rng = np.random.default_rng(seed)
    n = time.count
    upper = zone.upper
    trajectories = [_random_waypoint(rng, upper, speed, time.period, n) for _ in range(e)]
    if split == "equal":
        weights = np.full(e, 1.0 / e)
    else:
        raw = rng.integers(1, 6, size=e)
        weights = raw / raw.sum()
    rates = _partition_rates(rng, e, float(total_min_rate), split)

    fens = tuple(
        FenSpec(trajectory=t, weight=float(w), min_rate=float(r))
        for t, w, r in zip(trajectories, weights, rates)
    )
    return Scenario(
        zone=zone,
        time=time,
        fens=fens,
        backhaul_pos=vec3(backhaul_pos, "backhaul"),
        d_min=float(d_min),
        seed=int(seed),
    )


# -- serialization ---------------------------------------------------------------


def scenario_to_dict(scenario: Scenario) -> dict:
    return {
        "zone": list(scenario.zone.size),
        "time": {"horizon": scenario.time.horizon, "period": scenario.time.period},
        "backhaul": list(scenario.backhaul_pos),
        "d_min": scenario.d_min,
        "seed": scenario.seed,
        "fens": [
            {
                "weight": f.weight,
                "min_rate": f.min_rate,
                "positions": f.trajectory.tolist(),
            }
            for f in scenario.fens
        ],
    }


def _require(data: dict, key: str, where: str = ""):
    if key not in data:
        raise ScenarioError(f"{where}{key}: missing required field")
    return data[key]


def scenario_from_dict(data: dict) -> Scenario:
    """Build a scenario from its file representation.

    Either ``fens`` (explicit positions) or ``generator`` (parameters for
    :func:`generate_scenario`) must be present.
    """
    if not isinstance(data, dict):
        raise ScenarioError("scenario file must contain a mapping at top level")
    zone = Zone(vec3(_require(data, "zone"), "zone"))
    t = _require(data, "time")
    try:
        time = TimeGrid(float(t["horizon"]), float(t["period"]))
    except (KeyError, TypeError) as exc:
        raise ScenarioError(f"time: expected {{horizon, period}}, got {t!r}") from exc
    d_min = float(data.get("d_min", 1.0))
    seed = int(data.get("seed", 0))
    backhaul = data.get("backhaul")

    if "fens" in data:
        if backhaul is None:
            raise ScenarioError("backhaul: missing required field")
        fens = []
        for j, raw in enumerate(data["fens"]):
            where = f"fens[{j}]."
            try:
                fens.append(
                    FenSpec(
                        trajectory=np.asarray(_require(raw, "positions", where), dtype=float),
                        weight=float(_require(raw, "weight", where)),
                        min_rate=float(_require(raw, "min_rate", where)),
                    )
                )
            except ScenarioError as exc:
                msg = str(exc)
                raise ScenarioError(msg if msg.startswith("fens[") else where + msg) from exc
            except (TypeError, ValueError) as exc:
                raise ScenarioError(f"{where}: malformed entry ({exc})") from exc
        return Scenario(zone, time, tuple(fens), vec3(backhaul, "backhaul"), d_min, seed)

    if "generator" in data:
        g = data["generator"]
        try:
            return generate_scenario(
                seed=seed,
                e=int(_require(g, "count", "generator.")),
                total_min_rate=float(_require(g, "total_min_rate", "generator.")),
                zone=zone,
                time=time,
                speed=float(g.get("speed", 10.0)),
                backhaul_pos=backhaul,
                d_min=d_min,
                split=g.get("split", "random"),
            )
        except (TypeError, AttributeError) as exc:
            raise ScenarioError(f"generator: malformed block ({exc})") from exc

    raise ScenarioError("fens: missing (provide either 'fens' or 'generator')")


def save_scenario(scenario: Scenario, path: str | Path) -> None:
    Path(path).write_text(json.dumps(scenario_to_dict(scenario), indent=1) + "\n")


def load_scenario(path: str | Path) -> Scenario:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path}: malformed scenario file ({exc})") from exc
    return scenario_from_dict(data)
