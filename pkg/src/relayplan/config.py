"""Experiment configuration (YAML or JSON) in dBm, mm and MHz units."""

from __future__ import annotations

from pathlib import Path
from typing import Literal, Optional, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .assignment import ChannelSet
from .channel import RadioParams
from .scenario import TimeGrid, Zone
from .solvers import SOLVERS, DesParams, SaParams


class ConfigError(ValueError):
    pass


class _Block(BaseModel):
    model_config = ConfigDict(extra="forbid")


class TimeConfig(_Block):
    horizon: float = 30.0  # s
    period: float = 0.1  # s


class RadioConfig(_Block):
    tx_power_dbm: float = 20.0
    wavelength_mm: float = 60.0
    noise_psd_dbm_hz: float = -174.0


class ChannelConfig(_Block):
    values_mhz: list[float] = [20, 40, 80, 160]
    budget_mhz: float = 320.0


class SaConfig(_Block):
    t_max: float = 1e8
    s_max: int = Field(10_000, ge=0)
    step: float = Field(5.0, gt=0)
    beta: float = Field(0.8, gt=0, le=1)
    conv_sa_prune: bool = False
    safnet_prune: bool = True


class DesConfig(_Block):
    grid_step: float = Field(10.0, gt=0)
    cap: int = Field(10**7, ge=1)


def parse_seeds(spec: Union[str, int, list[int]]) -> list[int]:
    """``"0:20"`` -> 0..19, ``"1,4,9"`` -> list, ``5`` -> [5]."""
    if isinstance(spec, int):
        return [spec]
    if isinstance(spec, list):
        return [int(s) for s in spec]
    spec = spec.strip()
    if ":" in spec:
        a, b = spec.split(":", 1)
        return list(range(int(a), int(b)))
    return [int(s) for s in spec.split(",") if s.strip()]


class SweepConfig(_Block):
    master_seed: int = 0
    seeds: Union[str, int, list[int]] = "0:1"  # replicate indices
    fens: list[int] = [3]
    total_min_rates: list[float] = [450e6]  # bit/s

    @field_validator("fens")
    @classmethod
    def _fens_positive(cls, v):
        if not v or any(e < 1 for e in v):
            raise ValueError("fens must be a non-empty list of positive counts")
        return v

    @field_validator("total_min_rates")
    @classmethod
    def _rates_positive(cls, v):
        if not v or any(r <= 0 for r in v):
            raise ValueError("total_min_rates must be a non-empty list of positive rates")
        return v

    @property
    def replicates(self) -> list[int]:
        return parse_seeds(self.seeds)


class ExperimentConfig(_Block):
    zone: list[float] = [500.0, 500.0, 0.0]
    time: TimeConfig = TimeConfig()
    radio: RadioConfig = RadioConfig()
    channels: ChannelConfig = ChannelConfig()
    d_min: float = Field(1.0, gt=0)
    backhaul: Optional[list[float]] = None  # default (0, Z_y / 2, 0)
    speed: float = Field(10.0, ge=0)  # m/s, random-waypoint FEN speed
    split: Literal["random", "equal"] = "random"
    solvers: list[str] = ["heuristic", "conv_sa", "safnet"]
    sa: SaConfig = SaConfig()
    des: DesConfig = DesConfig()
    sweep: SweepConfig = SweepConfig()
    out: str = "results"
    trace: bool = False
    strict_des: bool = False
    parallel: int = Field(1, ge=1)

    @field_validator("solvers")
    @classmethod
    def _known_solvers(cls, v):
        if not v:
            raise ValueError("at least one solver is required")
        bad = [s for s in v if s not in SOLVERS]
        if bad:
            raise ValueError(f"unknown solvers {bad}; choose from {list(SOLVERS)}")
        return v

    @model_validator(mode="after")
    def _check_domain(self):
        # Surface domain errors at load time, with the field named.
        for name, build in (
            ("zone", self.zone_obj),
            ("time", self.time_grid),
            ("radio", self.radio_params),
            ("channels", self.channel_set),
        ):
            try:
                build()
            except ValueError as exc:
                raise ValueError(f"{name}: {exc}") from exc
        if not self.sweep.replicates:
            raise ValueError("sweep.seeds: at least one seed is required")
        return self

    def zone_obj(self) -> Zone:
        return Zone(tuple(self.zone))

    def time_grid(self) -> TimeGrid:
        return TimeGrid(self.time.horizon, self.time.period)

    def radio_params(self) -> RadioParams:
        r = self.radio
        return RadioParams.from_dbm(r.tx_power_dbm, r.wavelength_mm, r.noise_psd_dbm_hz)

    def channel_set(self) -> ChannelSet:
        return ChannelSet.from_mhz(self.channels.values_mhz, self.channels.budget_mhz)

    def backhaul_pos(self) -> tuple[float, float, float]:
        if self.backhaul is not None:
            return tuple(self.backhaul)
        return (0.0, self.zone[1] / 2, 0.0)

    def sa_params(self, solver: str, rng_seed: int) -> SaParams:
        s = self.sa
        prune = s.safnet_prune if solver == "safnet" else s.conv_sa_prune
        return SaParams(s.t_max, s.s_max, s.step, s.beta, rng_seed, prune=prune, trace=self.trace)

    def des_params(self) -> DesParams:
        return DesParams(self.des.grid_step, self.des.cap)


def load_config(path: Union[str, Path, None] = None, overrides: dict | None = None) -> ExperimentConfig:
    data: dict = {}
    if path is not None:
        try:
            data = yaml.safe_load(Path(path).read_text()) or {}
        except (OSError, yaml.YAMLError) as exc:
            raise ConfigError(f"{path}: cannot read config ({exc})") from exc
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: top level must be a mapping")
    for key, value in (overrides or {}).items():
        node = data
        *parents, leaf = key.split(".")
        for p in parents:
            node = node.setdefault(p, {})
        node[leaf] = value
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigError(str(exc)) from exc
