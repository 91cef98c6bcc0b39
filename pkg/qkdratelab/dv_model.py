# Copyright 2024 qkdratelab contributors

"""Asymptotic decoy-state DV-MDI-QKD key rate (polarisation encoding, infinite decoy states).

The relay performs a Bell state measurement with threshold single-photon detectors.
Y11 and e11 are the analytic single-photon values; the signal gain Q and QBER E come from
the closed-form click probabilities Omega1 (erroneous) and Omega2 (correct)."""

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .channel import ChannelPair
from .common import ZERO_TOLERANCE, QrlDegenerateInput, QrlDomainError, require_finite
from .special import bessel_i0m1, binary_entropy, binary_entropy_array


@dataclass(frozen=True)
class DvDeviceParams:
    """detector efficiency, misalignment, dark counts and error correction inefficiency"""

    eta_d: float = 0.93
    e_d: float = 0.001
    y0: float = 1e-6
    f_e: float = 1.16

    def __post_init__(self):
        _check_range("eta_d", self.eta_d, 0.0, 1.0, low_open=True)
        _check_range("e_d", self.e_d, 0.0, 0.5)
        _check_range("y0", self.y0, 0.0, 1.0, high_open=True)
        if require_finite("f_e", self.f_e) < 1.0:
            raise QrlDomainError(f"f_e must be >= 1, got {self.f_e!r}")


@dataclass(frozen=True)
class Intensities:
    """mean photon numbers of Alice's and Bob's signal states"""

    mu_a: float
    mu_b: float
    mu_max: float = 1.0

    def __post_init__(self):
        mu_max = require_finite("mu_max", self.mu_max)
        _check_range("mu_a", self.mu_a, 0.0, mu_max, low_open=True)
        _check_range("mu_b", self.mu_b, 0.0, mu_max, low_open=True)

    def swapped(self) -> "Intensities":
        """Bob's intensity becomes Alice's and vice versa"""
        return Intensities(self.mu_b, self.mu_a, self.mu_max)


@dataclass(frozen=True)
class DvRateBreakdown:
    """every term of the DV key rate; rate is signed"""

    p11: float
    y11: float
    e11x: float
    gain_z: float
    qber_z: float
    rate: float

    @property
    def secure_rate(self) -> float:
        """rate clamped at zero, for plotting"""
        return max(self.rate, 0.0)


def _check_range(name: str, value: float, low: float, high: float, low_open=False, high_open=False):
    value = require_finite(name, value)
    too_low = value <= low if low_open else value < low
    too_high = value >= high if high_open else value > high
    if too_low or too_high:
        left = "(" if low_open else "["
        right = ")" if high_open else "]"
        raise QrlDomainError(f"{name} must be within {left}{low}, {high}{right}, got {value!r}")


def _one_minus_q_exp(q_complement: float, t):
    """1 - (1 - y0) * exp(-t), free of cancellation for small t and y0"""
    return -np.expm1(-t) + q_complement * np.exp(-t)


def _yield_11(eta_a: float, eta_b: float, dev: DvDeviceParams) -> float:
    clicks_a = eta_a * dev.eta_d
    clicks_b = eta_b * dev.eta_d
    y0 = dev.y0
    return (1.0 - y0) ** 2 * (
        4.0 * y0**2 * (1.0 - clicks_a) * (1.0 - clicks_b)
        + 2.0 * y0 * (clicks_a + clicks_b - 1.5 * clicks_a * clicks_b)
        + 0.5 * clicks_a * clicks_b
    )


def _error_11x(eta_a: float, eta_b: float, dev: DvDeviceParams, y11: float) -> float:
    if y11 <= 0.0:
        raise QrlDegenerateInput("single-photon yield is zero, e11 is undefined")
    coherent = (1.0 - dev.y0) ** 2 * eta_a * eta_b * dev.eta_d**2 * (1.0 - dev.e_d) ** 2
    error = 0.5 - coherent / (4.0 * y11)
    if -ZERO_TOLERANCE < error < 0.0:
        return 0.0
    if 0.5 < error < 0.5 + ZERO_TOLERANCE:
        return 0.5
    return error


def _omegas(eta_a: float, eta_b: float, dev: DvDeviceParams, mu_a, mu_b):
    """(Omega1, Omega2) for scalar or array intensities.

    The brackets are expanded around I0 = 1 so that the O(1) terms cancel analytically:
    bracket1 = 2(1-qA)(1-qB) + remainder of the four Bessel terms, and likewise for bracket2."""
    e_d = dev.e_d
    y0 = dev.y0
    q = 1.0 - y0
    arrived_a = np.asarray(mu_a, dtype=float) * eta_a * dev.eta_d
    arrived_b = np.asarray(mu_b, dtype=float) * eta_b * dev.eta_d
    gamma = arrived_a + arrived_b
    beta = np.sqrt(arrived_a * arrived_b)
    lam = beta * math.sqrt(e_d * (1.0 - e_d))
    omega = arrived_a + e_d * (arrived_b - arrived_a)
    omega_rest = arrived_b + e_d * (arrived_a - arrived_b)  # gamma - omega
    prefactor = 2.0 * np.exp(-gamma / 2.0) * q**2

    near = gamma * e_d / 2.0
    far = gamma * (1.0 - e_d) / 2.0
    bessel_rest = (
        bessel_i0m1(beta)
        + bessel_i0m1(beta * (1.0 - 2.0 * e_d))
        - 2.0 * q * np.exp(-far) * bessel_i0m1(e_d * beta)
        - 2.0 * q * np.exp(-near) * bessel_i0m1(beta * (1.0 - e_d))
    )
    omega1 = prefactor * (2.0 * _one_minus_q_exp(y0, near) * _one_minus_q_exp(y0, far) + bessel_rest)

    bessel_rest = bessel_i0m1(2.0 * lam) - 2.0 * q * (np.exp(-omega / 2.0) + np.exp(-omega_rest / 2.0)) * bessel_i0m1(
        lam
    )
    omega2 = prefactor * (
        2.0 * _one_minus_q_exp(y0, omega / 2.0) * _one_minus_q_exp(y0, omega_rest / 2.0) + bessel_rest
    )
    return omega1, omega2


def _clamp_omega(name: str, value: float) -> float:
    if value < 0.0:
        if value < -ZERO_TOLERANCE:
            raise QrlDegenerateInput(f"{name} = {value!r} is negative beyond rounding")
        return 0.0
    return value


def yield_11(channel: ChannelPair, dev: DvDeviceParams) -> float:
    """single-photon yield Y11 (Z basis; equal to the X basis yield)"""
    return float(_yield_11(channel.eta_a, channel.eta_b, dev))


def error_11x(channel: ChannelPair, dev: DvDeviceParams) -> float:
    """single-photon phase error rate e11 in the X basis"""
    return float(_error_11x(channel.eta_a, channel.eta_b, dev, yield_11(channel, dev)))


def gain_and_qber(channel: ChannelPair, dev: DvDeviceParams, mu: Intensities) -> Tuple[float, float]:
    """overall Z-basis gain and QBER of the signal states"""
    omega1, omega2 = _omegas(channel.eta_a, channel.eta_b, dev, mu.mu_a, mu.mu_b)
    omega1 = _clamp_omega("Omega1", float(omega1))
    omega2 = _clamp_omega("Omega2", float(omega2))
    clicks = omega1 + omega2
    if clicks <= 0.0:
        raise QrlDegenerateInput("no successful Bell state measurement announcements (Omega1 + Omega2 = 0)")
    return clicks / 2.0, omega1 / clicks


def single_photon_probability(mu: Intensities) -> float:
    """joint probability that both users emit exactly one photon"""
    return mu.mu_a * mu.mu_b * math.exp(-(mu.mu_a + mu.mu_b))


def dv_key_rate(channel: ChannelPair, dev: DvDeviceParams, mu: Intensities) -> DvRateBreakdown:
    """secret key rate per pulse pair; negative values are kept"""
    y11 = yield_11(channel, dev)
    e11x = float(_error_11x(channel.eta_a, channel.eta_b, dev, y11))
    gain, qber = gain_and_qber(channel, dev, mu)
    p11 = single_photon_probability(mu)
    rate = p11 * y11 * (1.0 - binary_entropy(e11x)) - gain * dev.f_e * binary_entropy(qber)
    return DvRateBreakdown(p11=p11, y11=y11, e11x=e11x, gain_z=gain, qber_z=qber, rate=rate)


def dv_rate_grid(channel: ChannelPair, dev: DvDeviceParams, mu_a, mu_b) -> np.ndarray:
    """vectorised signed key rate over broadcastable intensity arrays; invalid cells are -inf"""
    y11 = _yield_11(channel.eta_a, channel.eta_b, dev)
    privacy = y11 * (1.0 - binary_entropy(_error_11x(channel.eta_a, channel.eta_b, dev, y11)))
    mu_a = np.asarray(mu_a, dtype=float)
    mu_b = np.asarray(mu_b, dtype=float)
    omega1, omega2 = _omegas(channel.eta_a, channel.eta_b, dev, mu_a, mu_b)
    valid = (omega1 >= -ZERO_TOLERANCE) & (omega2 >= -ZERO_TOLERANCE)
    omega1 = np.maximum(omega1, 0.0)
    omega2 = np.maximum(omega2, 0.0)
    clicks = omega1 + omega2
    valid &= clicks > 0.0
    qber = np.divide(omega1, clicks, out=np.zeros_like(clicks), where=clicks > 0.0)
    p11 = mu_a * mu_b * np.exp(-(mu_a + mu_b))
    rate = p11 * privacy - clicks / 2.0 * dev.f_e * binary_entropy_array(qber)
    return np.where(valid, rate, -np.inf)
