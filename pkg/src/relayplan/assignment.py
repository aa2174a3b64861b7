"""Discrete channel-bandwidth domain.

An assignment gives one channel from the supported set to every FEN link
and one to the backhaul link. Slots are ordered FEN 0..E-1, backhaul last.
Solvers work on ``(K, E + 1)`` arrays of bandwidths in Hz; the object types
here are for reporting and the public API.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .scenario import Vec3, vec3

MHZ = 1e6
ENUMERATION_CAP = 10**7


class EnumerationError(ValueError):
    """Combination count is beyond the configured cap."""


@dataclass(frozen=True)
class ChannelSet:
    values: tuple[float, ...]  # Hz, ascending
    budget: float  # Hz

    def __post_init__(self) -> None:
        values = tuple(float(v) for v in self.values)
        object.__setattr__(self, "values", values)
        if not values:
            raise ValueError("channels: empty channel set")
        if any(v <= 0 for v in values):
            raise ValueError("channels: values must be positive")
        if any(b <= a for a, b in zip(values, values[1:])):
            raise ValueError("channels: values must be strictly ascending")
        if self.budget < values[-1]:
            raise ValueError("channels: budget smaller than the widest channel")

    @classmethod
    def from_mhz(cls, values: Iterable[float] = (20, 40, 80, 160), budget: float = 320) -> "ChannelSet":
        return cls(tuple(v * MHZ for v in values), budget * MHZ)

    def __contains__(self, bw: float) -> bool:
        return bw in self.values

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class BandwidthAssignment:
    fen_bw: tuple[float, ...]
    backhaul_bw: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "fen_bw", tuple(float(b) for b in self.fen_bw))
        object.__setattr__(self, "backhaul_bw", float(self.backhaul_bw))

    @property
    def total(self) -> float:
        return math.fsum(self.fen_bw) + self.backhaul_bw

    def as_array(self) -> np.ndarray:
        return np.array([*self.fen_bw, self.backhaul_bw])

    @classmethod
    def from_array(cls, arr: Sequence[float]) -> "BandwidthAssignment":
        return cls(tuple(arr[:-1]), arr[-1])

    def labeled_mhz(self) -> dict[str, int]:
        out = {f"fen[{j}]": int(round(b / MHZ)) for j, b in enumerate(self.fen_bw)}
        out["backhaul"] = int(round(self.backhaul_bw / MHZ))
        return out

    def __str__(self) -> str:
        return "{" + ", ".join(f"{k}: {v}" for k, v in self.labeled_mhz().items()) + "}"


@dataclass(frozen=True)
class Solution:
    hap_pos: Vec3
    assignment: BandwidthAssignment

    def __post_init__(self) -> None:
        object.__setattr__(self, "hap_pos", vec3(self.hap_pos, "hap_pos"))

    def check(self, channels: ChannelSet) -> None:
        bad = [b for b in (*self.assignment.fen_bw, self.assignment.backhaul_bw) if b not in channels]
        if bad:
            raise ValueError(f"assignment uses unsupported bandwidths {bad}")


def assignment_matrix(e: int, channels: ChannelSet, cap: int = ENUMERATION_CAP) -> np.ndarray:
    """All ``|C|**(e+1)`` assignments as rows, lexicographic over channel indices."""
    if e < 1:
        raise ValueError(f"e must be >= 1, got {e}")
    count = len(channels) ** (e + 1)
    if count > cap:
        raise EnumerationError(
            f"{count} bandwidth combinations for {e} FENs exceed the cap of {cap}; use fewer FENs"
        )
    idx = np.indices((len(channels),) * (e + 1)).reshape(e + 1, -1).T
    return np.asarray(channels.values)[idx]


def prune_matrix(candidates: np.ndarray, budget: float, beta: float) -> np.ndarray:
    if not 0 < beta <= 1:
        raise ValueError(f"beta must be in (0, 1], got {beta}")
    totals = candidates.sum(axis=1)
    keep = (totals >= beta * budget) & (totals <= budget)
    return candidates[keep]


def enumerate_assignments(
    e: int, channels: ChannelSet, cap: int = ENUMERATION_CAP
) -> list[BandwidthAssignment]:
    return [BandwidthAssignment.from_array(row.tolist()) for row in assignment_matrix(e, channels, cap)]


def prune_assignments(
    assignments: Sequence[BandwidthAssignment], budget: float, beta: float
) -> list[BandwidthAssignment]:
    """Keep assignments whose total lies in ``[beta * budget, budget]``."""
    if not 0 < beta <= 1:
        raise ValueError(f"beta must be in (0, 1], got {beta}")
    lo = beta * budget
    return [a for a in assignments if lo <= a.total <= budget]


def round_down_to_channel(raw: float, channels: ChannelSet) -> float:
    """Largest supported channel not wider than ``raw``; never below the narrowest."""
    best = channels.values[0]
    for v in channels.values:
        if v <= raw:
            best = v
    return best
