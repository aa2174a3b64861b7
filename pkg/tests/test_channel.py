import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracle import link_rate
from relayplan.channel import (
    D_FLOOR,
    GeometryError,
    RadioParams,
    capacity,
    dbm_to_watts,
    link_capacity,
    path_loss,
    snr,
    watts_to_dbm,
)
from relayplan.scenario import distance

# mpmath, 40 digits
PL_100 = 2.279726631952599857e-9
SNR_100_20MHZ = 2863.2071971763849838
CAP_100_20MHZ = 229678402.91628060872


def test_unit_gain_distance():
    lam = 4 * math.pi * 0.5  # unit-gain distance 0.5 m, above the floor
    assert path_loss(lam / (4 * math.pi), lam) == pytest.approx(1.0, rel=1e-15)


def test_path_loss_100m():
    assert path_loss(100.0, 0.06) == pytest.approx(PL_100, rel=1e-12)


def test_inverse_square_exact():
    assert path_loss(200.0, 0.06) == path_loss(100.0, 0.06) / 4


@given(st.floats(D_FLOOR, 1e5))
def test_inverse_square_property(d):
    assert path_loss(2 * d, 0.06) == pytest.approx(path_loss(d, 0.06) / 4, rel=1e-14)


def test_path_loss_floor():
    with pytest.raises(GeometryError):
        path_loss(0.05, 0.06)
    with pytest.raises(GeometryError):
        path_loss(np.array([1.0, 0.0]), 0.06)


def test_snr_identity():
    assert snr(1, 1, 1, 1) == 1


def test_snr_table_values():
    r = RadioParams.from_dbm()
    assert snr(r.tx_power, PL_100, 20e6, r.noise_psd) == pytest.approx(SNR_100_20MHZ, rel=1e-12)


def test_snr_halves_with_double_bandwidth():
    assert snr(0.1, 1e-9, 40e6, 4e-21) == snr(0.1, 1e-9, 20e6, 4e-21) / 2


def test_snr_rejects_zero_bandwidth():
    with pytest.raises(ValueError):
        snr(1, 1, 0, 1)


def test_capacity_values():
    assert capacity(20e6, 0.0) == 0
    assert capacity(20e6, 1.0) == 2e7
    assert capacity(20e6, SNR_100_20MHZ) == pytest.approx(CAP_100_20MHZ, rel=1e-12)


@given(st.floats(1e-2, 1e6), st.floats(1e3, 1e9), st.floats(1.01, 10))
def test_capacity_increases_with_bandwidth_at_fixed_power(gamma, b, k):
    # received power fixed: gamma scales as 1/B
    c = gamma * b
    assert capacity(b * k, c / (b * k)) > capacity(b, c / b)


def test_link_capacity_table_example():
    r = RadioParams.from_dbm()
    assert link_capacity((0, 0, 0), (100, 0, 0), 20e6, r) == pytest.approx(CAP_100_20MHZ, rel=1e-12)


def test_link_capacity_matches_oracle():
    rng = np.random.default_rng(0)
    r = RadioParams.from_dbm()
    for _ in range(100):
        a, b = rng.uniform(0, 500, 3), rng.uniform(0, 500, 3)
        bw = float(rng.choice([20e6, 40e6, 80e6, 160e6]))
        got = link_capacity(a, b, bw, r)
        chained = capacity(bw, snr(r.tx_power, path_loss(distance(a, b), r.wavelength), bw, r.noise_psd))
        assert got == chained
        assert got == pytest.approx(link_rate(r.tx_power, r.wavelength, r.noise_psd, bw, a, b), rel=1e-12)


def test_link_capacity_monotone_along_ray():
    r = RadioParams.from_dbm()
    caps = [link_capacity((0, 0, 0), (t, t / 2, 0), 40e6, r) for t in np.linspace(1, 400, 50)]
    assert all(x >= y for x, y in zip(caps, caps[1:]))


def test_unit_round_trips():
    assert dbm_to_watts(20) == pytest.approx(0.1, rel=1e-12)
    assert dbm_to_watts(-174) == pytest.approx(3.9810717055349725e-21, rel=1e-12)
    for dbm in (20.0, -174.0, 0.0, 33.3):
        assert watts_to_dbm(dbm_to_watts(dbm)) == pytest.approx(dbm, abs=1e-9)


def test_radio_validation():
    with pytest.raises(ValueError):
        RadioParams(0.1, 0.0, 1e-21)
