# Copyright 2024 qkdratelab contributors

"""DV-MDI-QKD rate model: closed forms, limits and an arbitrary-precision oracle"""

# pylint: disable=missing-function-docstring

import math

import mpmath
import numpy as np
import pytest

from qkdratelab import ChannelPair, DvDeviceParams, Intensities, QrlDomainError, dv_key_rate
from qkdratelab.dv_model import dv_rate_grid, error_11x, gain_and_qber, single_photon_probability, yield_11

mpmath.mp.dps = 50

TABLE_I = DvDeviceParams()


def _mp_gain_qber(eta_a, eta_b, eta_d, e_d, y0, mu_a, mu_b):
    """gain and QBER from the textbook Bessel expressions, in 50 digits"""
    eta_a, eta_b, eta_d, e_d, y0, mu_a, mu_b = map(mpmath.mpf, (eta_a, eta_b, eta_d, e_d, y0, mu_a, mu_b))
    i0 = lambda x: mpmath.besseli(0, x)  # noqa: E731
    q = 1 - y0
    gamma = (mu_a * eta_a + mu_b * eta_b) * eta_d
    beta = eta_d * mpmath.sqrt(mu_a * mu_b * eta_a * eta_b)
    lam = beta * mpmath.sqrt(e_d * (1 - e_d))
    omega = mu_a * eta_a * eta_d + e_d * (mu_b * eta_b - mu_a * eta_a) * eta_d
    pre = 2 * mpmath.exp(-gamma / 2) * q**2
    omega1 = pre * (
        i0(beta)
        + i0(beta - 2 * beta * e_d)
        + 2 * q**2 * mpmath.exp(-gamma / 2)
        - 2 * q * mpmath.exp(-gamma * (1 - e_d) / 2) * i0(e_d * beta)
        - 2 * q * mpmath.exp(-gamma * e_d / 2) * i0(beta - e_d * beta)
    )
    omega2 = pre * (
        1
        + i0(2 * lam)
        + 2 * q**2 * mpmath.exp(-gamma / 2)
        - 2 * q * mpmath.exp(-omega / 2) * i0(lam)
        - 2 * q * mpmath.exp(-(gamma - omega) / 2) * i0(lam)
    )
    return float((omega1 + omega2) / 2), float(omega1 / (omega1 + omega2))


@pytest.fixture(name="zero_loss")
def _zero_loss():
    yield ChannelPair(1.0, 1.0)


def test_yield_11_values(zero_loss):
    assert yield_11(zero_loss, DvDeviceParams(eta_d=1.0, y0=0.0)) == pytest.approx(0.5, abs=1e-15)
    assert yield_11(zero_loss, TABLE_I) == pytest.approx(0.43245, abs=1e-5)


def test_yield_11_without_dark_counts():
    channel = ChannelPair(0.3, 0.07)
    dev = DvDeviceParams(eta_d=0.8, y0=0.0)
    assert yield_11(channel, dev) == pytest.approx(0.3 * 0.07 * 0.8**2 / 2.0, rel=1e-12)


def test_error_11x_values(zero_loss):
    channel = ChannelPair(0.6, 0.2)
    assert error_11x(channel, DvDeviceParams(e_d=0.0, y0=0.0)) == pytest.approx(0.0, abs=1e-12)
    assert error_11x(channel, DvDeviceParams(e_d=0.5, y0=0.0)) == pytest.approx(0.375, abs=1e-12)
    assert 0.0 < error_11x(zero_loss, TABLE_I) < 0.005


def test_gain_and_qber_matches_oracle(zero_loss):
    gain, qber = gain_and_qber(zero_loss, TABLE_I, Intensities(0.5, 0.5))
    expected_gain, expected_qber = _mp_gain_qber(1.0, 1.0, 0.93, 0.001, 1e-6, 0.5, 0.5)
    assert gain == pytest.approx(expected_gain, rel=1e-10)
    assert qber == pytest.approx(expected_qber, rel=1e-10)


def test_gain_and_qber_matches_oracle_on_random_draws():
    rng = np.random.default_rng(2024)
    for _ in range(100):
        eta_a, eta_b = 10.0 ** -rng.uniform(0.0, 3.0, size=2)
        eta_d = rng.uniform(0.5, 1.0)
        e_d = rng.uniform(1e-4, 0.05)
        y0 = 10.0 ** rng.uniform(-8.0, -4.0)
        mu_a, mu_b = rng.uniform(0.01, 1.0, size=2)
        dev = DvDeviceParams(eta_d=eta_d, e_d=e_d, y0=y0)
        gain, qber = gain_and_qber(ChannelPair(eta_a, eta_b), dev, Intensities(mu_a, mu_b))
        expected_gain, expected_qber = _mp_gain_qber(eta_a, eta_b, eta_d, e_d, y0, mu_a, mu_b)
        assert gain == pytest.approx(expected_gain, rel=1e-10)
        assert qber == pytest.approx(expected_qber, rel=1e-10)


def test_no_misalignment_no_darks_means_no_errors():
    dev = DvDeviceParams(e_d=0.0, y0=0.0)
    for mu_a, mu_b, eta_a, eta_b in [(0.5, 0.5, 1.0, 1.0), (0.1, 0.9, 0.3, 0.01), (1.0, 0.02, 1.0, 0.5)]:
        _, qber = gain_and_qber(ChannelPair(eta_a, eta_b), dev, Intensities(mu_a, mu_b))
        assert qber == pytest.approx(0.0, abs=1e-12)


def test_gain_vanishes_without_light_and_darks(zero_loss):
    gain, _ = gain_and_qber(zero_loss, DvDeviceParams(y0=0.0), Intensities(1e-9, 1e-9))
    assert 0.0 <= gain < 1e-8


def test_terms_stay_in_range():
    rng = np.random.default_rng(11)
    for _ in range(10000):
        eta_a, eta_b = 10.0 ** -rng.uniform(0.0, 5.0, size=2)
        dev = DvDeviceParams(
            eta_d=rng.uniform(0.05, 1.0), e_d=rng.uniform(0.0, 0.5), y0=10.0 ** rng.uniform(-9.0, -2.0)
        )
        channel = ChannelPair(eta_a, eta_b)
        gain, qber = gain_and_qber(channel, dev, Intensities(*rng.uniform(1e-3, 1.0, size=2)))
        assert 0.0 <= yield_11(channel, dev) <= 1.0
        assert 0.0 <= gain <= 1.0
        assert 0.0 <= error_11x(channel, dev) <= 0.5 + 1e-12
        assert 0.0 <= qber <= 0.5 + 1e-12


def test_rate_without_errors_is_single_photon_term(zero_loss):
    dev = DvDeviceParams(eta_d=1.0, e_d=0.0, y0=0.0)
    breakdown = dv_key_rate(zero_loss, dev, Intensities(0.5, 0.5))
    assert breakdown.qber_z == pytest.approx(0.0, abs=1e-12)
    assert breakdown.p11 == pytest.approx(0.25 * math.exp(-1.0))
    assert breakdown.rate == pytest.approx(breakdown.p11 * 0.5, rel=1e-12)
    assert breakdown.rate > 0.0


@pytest.mark.parametrize("loss", [0.0, 4.0, 20.0])
def test_rate_negative_at_tiny_intensities(loss):
    eta = 10.0 ** (-loss / 20.0)
    breakdown = dv_key_rate(ChannelPair(eta, eta), TABLE_I, Intensities(1e-6, 1e-6))
    assert breakdown.rate < 0.0
    assert breakdown.secure_rate == 0.0


def test_swapping_the_users_changes_nothing():
    rng = np.random.default_rng(5)
    for _ in range(50):
        channel = ChannelPair(*(10.0 ** -rng.uniform(0.0, 3.0, size=2)))
        mu = Intensities(*rng.uniform(0.01, 1.0, size=2))
        forward = dv_key_rate(channel, TABLE_I, mu)
        backward = dv_key_rate(channel.swapped(), TABLE_I, mu.swapped())
        for field in ("y11", "gain_z", "qber_z", "rate"):
            assert getattr(backward, field) == pytest.approx(getattr(forward, field), rel=1e-12, abs=1e-300)


def test_grid_agrees_with_scalar_rate():
    channel = ChannelPair(0.8, 0.3)
    mu_a = np.array([0.05, 0.2, 0.7])
    mu_b = np.array([0.1, 0.4, 0.9])
    grid = dv_rate_grid(channel, TABLE_I, mu_a[:, None], mu_b[None, :])
    assert grid.shape == (3, 3)
    for i, a in enumerate(mu_a):
        for j, b in enumerate(mu_b):
            assert grid[i, j] == pytest.approx(dv_key_rate(channel, TABLE_I, Intensities(a, b)).rate, rel=1e-9)


def test_single_photon_probability():
    assert single_photon_probability(Intensities(1.0, 1.0)) == pytest.approx(math.exp(-2.0))


@pytest.mark.parametrize(
    "kwargs",
    [{"eta_d": 0.0}, {"eta_d": 1.1}, {"e_d": 0.6}, {"e_d": -0.1}, {"y0": 1.0}, {"f_e": 0.9}, {"y0": math.nan}],
)
def test_device_params_validated(kwargs):
    with pytest.raises(QrlDomainError):
        DvDeviceParams(**kwargs)


@pytest.mark.parametrize("mu_a, mu_b", [(0.0, 0.5), (0.5, 1.5), (-0.1, 0.2)])
def test_intensities_validated(mu_a, mu_b):
    with pytest.raises(QrlDomainError):
        Intensities(mu_a, mu_b)
