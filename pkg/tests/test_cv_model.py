# Copyright 2024 qkdratelab contributors

"""CV-MDI-QKD rate model"""

# pylint: disable=missing-function-docstring

import mpmath
import numpy as np
import pytest

from qkdratelab import ChannelPair, CvDeviceParams, QrlDomainError, QrlModelDomainError, cv_key_rate
from qkdratelab.channel import channel_from_total_loss
from qkdratelab.cv_model import (
    CvBranch,
    equivalent_noise,
    eve_info_asymmetric,
    eve_info_symmetric,
    mutual_info_ab,
    select_branch,
)

mpmath.mp.dps = 50

TABLE_II = CvDeviceParams()


def _mp_h(x):
    upper, lower = (x + 1) / 2, (x - 1) / 2
    return upper * mpmath.log(upper, 2) - lower * mpmath.log(lower, 2)


def _mp_cv(eta_a, eta_b, eta_d, epsilon, phi, xi, symmetric):
    """(I_AB, I_E, rate) from the closed forms, in 50 digits"""
    eta_a, eta_b, eta_d, epsilon, phi, xi = map(mpmath.mpf, (eta_a, eta_b, eta_d, epsilon, phi, xi))
    if symmetric:
        chi = 4 / (eta_a * eta_d) + epsilon
        i_e = mpmath.log(mpmath.e**2 * (chi - 4) * (phi + 1) / 16, 2) - _mp_h(chi / 2 - 1)
    else:
        total, mismatch = eta_a + eta_b, abs(eta_a - eta_b)
        chi = 2 * total / (eta_a * eta_b * eta_d) + epsilon
        beta = (eta_a * eta_b * chi - total**2) / (mismatch * total)
        gamma = mpmath.e * mismatch * (phi + 1) / (2 * total)
        delta = (eta_a * chi - total) / total
        i_e = _mp_h(beta) + mpmath.log(gamma, 2) - _mp_h(delta)
    i_ab = mpmath.log((phi + 1) / chi, 2)
    return float(i_ab), float(i_e), float(xi * i_ab - i_e)


@pytest.mark.parametrize(
    "eta_a, eta_b, dev, expected",
    [
        (1.0, 1.0, CvDeviceParams(eta_d=1.0, epsilon=0.0), 4.0),
        (1.0, 1.0, TABLE_II, 4.0916327),
        (1.0, 0.5, TABLE_II, 6.1324490),
    ],
)
def test_equivalent_noise(eta_a, eta_b, dev, expected):
    assert equivalent_noise(ChannelPair(eta_a, eta_b), dev) == pytest.approx(expected, abs=1e-7)


def test_equivalent_noise_branches_agree_on_equal_arms():
    channel = ChannelPair(0.7, 0.7)
    asymmetric = equivalent_noise(channel, TABLE_II, CvBranch.ASYMMETRIC)
    assert asymmetric == pytest.approx(equivalent_noise(channel, TABLE_II, CvBranch.SYMMETRIC), rel=1e-12)


@pytest.mark.parametrize("chi, phi, expected", [(4.0, 3.0, 0.0), (4.0916327, 60.0, 3.8981), (61.0, 60.0, 0.0)])
def test_mutual_info_ab(chi, phi, expected):
    assert mutual_info_ab(chi, CvDeviceParams(phi=phi)) == pytest.approx(expected, abs=1e-4)


def test_mutual_info_ab_rejects_non_positive_noise():
    with pytest.raises(QrlDomainError):
        mutual_info_ab(0.0, TABLE_II)


def test_eve_info_asymmetric():
    assert eve_info_asymmetric(ChannelPair(1.0, 0.5), TABLE_II) == pytest.approx(3.009, abs=2e-3)


def test_eve_info_asymmetric_hands_degenerate_arms_over():
    channel = ChannelPair(1.0, 0.99999999999)
    assert select_branch(channel) is CvBranch.SYMMETRIC
    with pytest.raises(QrlDomainError):
        eve_info_asymmetric(channel, TABLE_II)
    assert cv_key_rate(channel, TABLE_II).branch is CvBranch.SYMMETRIC


def test_eve_info_symmetric():
    assert eve_info_symmetric(ChannelPair(1.0, 1.0), TABLE_II) == pytest.approx(1.210, abs=2e-3)
    with pytest.raises(QrlDomainError):
        eve_info_symmetric(ChannelPair(1.0, 0.5), TABLE_II)


def test_eve_info_symmetric_singular_with_perfect_devices():
    with pytest.raises(QrlModelDomainError):
        eve_info_symmetric(ChannelPair(1.0, 1.0), CvDeviceParams(eta_d=1.0, epsilon=0.0))


def test_rate_at_zero_loss():
    breakdown = cv_key_rate(ChannelPair(1.0, 1.0), TABLE_II)
    assert breakdown.branch is CvBranch.SYMMETRIC
    assert breakdown.chi == pytest.approx(4.0916327, abs=1e-7)
    assert breakdown.i_ab == pytest.approx(3.8981, abs=1e-4)
    assert breakdown.rate == pytest.approx(2.5712, abs=1e-3)


def test_rate_near_symmetric_cutoff():
    assert abs(cv_key_rate(channel_from_total_loss(1.25, "symmetric"), TABLE_II).rate) < 0.05


def test_detection_efficiency_collapse():
    zero_loss = ChannelPair(1.0, 1.0)
    assert cv_key_rate(zero_loss, CvDeviceParams(eta_d=0.85)).rate < 0.0
    assert cv_key_rate(zero_loss, CvDeviceParams(eta_d=0.90)).rate > 0.0


@pytest.mark.parametrize("eta", [1.0, 0.630957, 0.3])
def test_symmetric_matches_oracle(eta):
    breakdown = cv_key_rate(ChannelPair(eta, eta), TABLE_II)
    i_ab, i_e, rate = _mp_cv(eta, eta, 0.98, 0.01, 60.0, 0.97, symmetric=True)
    assert breakdown.i_ab == pytest.approx(i_ab, rel=1e-9)
    assert breakdown.i_e == pytest.approx(i_e, rel=1e-9)
    assert breakdown.rate == pytest.approx(rate, rel=1e-9)


def test_asymmetric_at_4db_matches_oracle():
    breakdown = cv_key_rate(ChannelPair(1.0, 0.398107170553497), TABLE_II)
    assert breakdown.branch is CvBranch.ASYMMETRIC
    _, i_e, _ = _mp_cv(1.0, 0.398107170553497, 0.98, 0.01, 60.0, 0.97, symmetric=False)
    assert breakdown.i_e == pytest.approx(i_e, rel=1e-9)


def test_matches_oracle_on_random_draws():
    rng = np.random.default_rng(99)
    for draw in range(100):
        dev = CvDeviceParams(
            eta_d=rng.uniform(0.85, 1.0),
            epsilon=rng.uniform(0.001, 0.05),
            phi=rng.uniform(10.0, 100.0),
            xi=rng.uniform(0.9, 1.0),
        )
        symmetric = draw % 2 == 0
        eta_a = rng.uniform(0.3, 1.0)
        eta_b = eta_a if symmetric else eta_a * rng.uniform(0.1, 0.95)
        breakdown = cv_key_rate(ChannelPair(eta_a, eta_b), dev)
        i_ab, i_e, rate = _mp_cv(eta_a, eta_b, dev.eta_d, dev.epsilon, dev.phi, dev.xi, symmetric)
        assert breakdown.i_ab == pytest.approx(i_ab, rel=1e-9)
        assert breakdown.i_e == pytest.approx(i_e, rel=1e-9)
        assert breakdown.rate == pytest.approx(rate, rel=1e-9, abs=1e-9)


def test_branches_converge():
    eta = 0.5
    symmetric = eve_info_symmetric(ChannelPair(eta, eta), TABLE_II)
    gaps = [
        abs(eve_info_asymmetric(ChannelPair(eta * (1.0 + t), eta * (1.0 - t)), TABLE_II) - symmetric)
        for t in (1e-2, 1e-3, 1e-4)
    ]
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[2] < 0.05


@pytest.mark.parametrize("scenario", ["asymmetric", "symmetric"])
def test_rate_non_increasing_in_loss(scenario):
    rates = [cv_key_rate(channel_from_total_loss(loss, scenario), TABLE_II).rate for loss in np.linspace(0, 3, 31)]
    assert all(later <= earlier + 1e-9 for earlier, later in zip(rates, rates[1:]))


@pytest.mark.parametrize("loss", [0.0, 1.0])
def test_rate_non_decreasing_in_detection_efficiency(loss):
    channel = channel_from_total_loss(loss, "symmetric")
    rates = [cv_key_rate(channel, CvDeviceParams(eta_d=eta_d)).rate for eta_d in np.linspace(0.85, 1.0, 16)]
    assert all(later >= earlier - 1e-9 for earlier, later in zip(rates, rates[1:]))


@pytest.mark.parametrize(
    "kwargs", [{"eta_d": 0.0}, {"eta_d": 1.01}, {"epsilon": -0.01}, {"phi": 0.0}, {"xi": 0.0}, {"xi": 1.2}]
)
def test_device_params_validated(kwargs):
    with pytest.raises(QrlDomainError):
        CvDeviceParams(**kwargs)
