"""Free-space link model: path loss, SNR and Shannon capacity.

Everything here works in linear SI units. dB conversions happen once, when
:class:`RadioParams` is built from table-style values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .scenario import distance

D_FLOOR = 0.1  # m; closer than this the free-space model is not evaluated


class GeometryError(ValueError):
    """Two nodes are too close for the path-loss model."""


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


def watts_to_dbm(watts: float) -> float:
    return 10.0 * math.log10(watts) + 30.0


@dataclass(frozen=True)
class RadioParams:
    tx_power: float  # W
    wavelength: float  # m
    noise_psd: float  # W/Hz

    def __post_init__(self) -> None:
        for name in ("tx_power", "wavelength", "noise_psd"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ValueError(f"radio.{name} must be positive and finite, got {value}")

    @classmethod
    def from_dbm(
        cls,
        tx_power_dbm: float = 20.0,
        wavelength_mm: float = 60.0,
        noise_psd_dbm_hz: float = -174.0,
    ) -> "RadioParams":
        return cls(
            tx_power=dbm_to_watts(tx_power_dbm),
            wavelength=wavelength_mm * 1e-3,
            noise_psd=dbm_to_watts(noise_psd_dbm_hz),
        )


def path_loss(d, wavelength: float):
    """Free-space channel gain ``(wavelength / (4 pi d))**2``.

    Accepts scalars or arrays. Raises :class:`GeometryError` when any
    distance is below :data:`D_FLOOR`.
    """
    if np.any(np.asarray(d) < D_FLOOR):
        raise GeometryError(f"distance below {D_FLOOR} m floor")
    return (wavelength / (4.0 * math.pi * d)) ** 2


def snr(p_tx: float, gain, bandwidth, n0: float):
    if np.any(np.asarray(bandwidth) <= 0):
        raise ValueError("bandwidth must be positive")
    return p_tx * gain / (bandwidth * n0)


def capacity(bandwidth, gamma):
    """Shannon capacity in bit/s."""
    return bandwidth * np.log2(1.0 + gamma)


def link_capacity(
    tx_pos: Sequence[float], rx_pos: Sequence[float], bandwidth: float, radio: RadioParams
) -> float:
    gain = path_loss(distance(tx_pos, rx_pos), radio.wavelength)
    return float(capacity(bandwidth, snr(radio.tx_power, gain, bandwidth, radio.noise_psd)))
