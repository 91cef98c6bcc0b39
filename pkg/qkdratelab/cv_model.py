# Copyright 2024 qkdratelab contributors

"""Asymptotic CV-MDI-QKD key rate R = xi * I_AB - I_E under the two-link Gaussian attack,
in the large modulation regime, with the asymmetric and symmetric forms of Eve's information"""

from dataclasses import dataclass
from enum import Enum
from typing import Optional

from .channel import ChannelPair
from .common import EULER, QrlDomainError, QrlModelDomainError, require_finite
from .special import h_function, safe_log2

# relative arm mismatch below which the symmetric closed form is used
DEGENERACY_THRESHOLD = 1e-9


@dataclass(frozen=True)
class CvDeviceParams:
    """relay detection efficiency, excess noise and modulation variance (shot-noise units),
    reconciliation efficiency"""

    eta_d: float = 0.98
    epsilon: float = 0.01
    phi: float = 60.0
    xi: float = 0.97

    def __post_init__(self):
        if not 0.0 < require_finite("eta_d", self.eta_d) <= 1.0:
            raise QrlDomainError(f"eta_d must be within (0, 1], got {self.eta_d!r}")
        if require_finite("epsilon", self.epsilon) < 0.0:
            raise QrlDomainError(f"epsilon must be non-negative, got {self.epsilon!r}")
        if require_finite("phi", self.phi) <= 0.0:
            raise QrlDomainError(f"phi must be positive, got {self.phi!r}")
        if not 0.0 < require_finite("xi", self.xi) <= 1.0:
            raise QrlDomainError(f"xi must be within (0, 1], got {self.xi!r}")


class CvBranch(str, Enum):
    """which closed form of Eve's information applies"""

    ASYMMETRIC = "asymmetric"
    SYMMETRIC = "symmetric"


@dataclass(frozen=True)
class CvRateBreakdown:
    """terms of the CV key rate; rate is signed"""

    chi: float
    i_ab: float
    i_e: float
    rate: float
    branch: CvBranch

    @property
    def secure_rate(self) -> float:
        """rate clamped at zero, for plotting"""
        return max(self.rate, 0.0)


def select_branch(channel: ChannelPair) -> CvBranch:
    """symmetric when the arms match to DEGENERACY_THRESHOLD (relative)"""
    mismatch = abs(channel.eta_a - channel.eta_b) / max(channel.eta_a, channel.eta_b)
    return CvBranch.SYMMETRIC if mismatch < DEGENERACY_THRESHOLD else CvBranch.ASYMMETRIC


def equivalent_noise(channel: ChannelPair, dev: CvDeviceParams, branch: Optional[CvBranch] = None) -> float:
    """equivalent noise chi (shot-noise units) referred to the channel input"""
    if branch is None:
        branch = select_branch(channel)
    if branch is CvBranch.SYMMETRIC:
        eta = (channel.eta_a + channel.eta_b) / 2.0
        return 4.0 / (eta * dev.eta_d) + dev.epsilon
    eta_a, eta_b = channel.eta_a, channel.eta_b
    return 2.0 * (eta_a + eta_b) / (eta_a * eta_b * dev.eta_d) + dev.epsilon


def mutual_info_ab(chi: float, dev: CvDeviceParams) -> float:
    """Alice-Bob mutual information (bits per use)"""
    chi = require_finite("chi", chi)
    if chi <= 0.0:
        raise QrlDomainError(f"equivalent noise must be positive, got {chi!r}")
    return safe_log2((dev.phi + 1.0) / chi)


def eve_info_asymmetric(channel: ChannelPair, dev: CvDeviceParams) -> float:
    """Eve's information for unequal arms, I_E = h(beta) + log2(gamma) - h(delta)"""
    if select_branch(channel) is CvBranch.SYMMETRIC:
        raise QrlDomainError(
            f"arms are degenerate (eta_a={channel.eta_a!r}, eta_b={channel.eta_b!r}), use the symmetric form"
        )
    eta_a, eta_b = channel.eta_a, channel.eta_b
    chi = equivalent_noise(channel, dev, CvBranch.ASYMMETRIC)
    total = eta_a + eta_b
    mismatch = abs(eta_a - eta_b)
    beta = (eta_a * eta_b * chi - total**2) / (mismatch * total)
    gamma = EULER * mismatch * (dev.phi + 1.0) / (2.0 * total)
    delta = (eta_a * chi - total) / total
    if beta < 1.0 or delta < 1.0:
        raise QrlModelDomainError(
            f"Gaussian attack formula outside its validity region (beta={beta!r}, delta={delta!r})"
        )
    return h_function(beta) + safe_log2(gamma) - h_function(delta)


def eve_info_symmetric(channel: ChannelPair, dev: CvDeviceParams) -> float:
    """Eve's information for equal arms, I_E = log2(e^2 (chi-4)(phi+1)/16) - h(chi/2 - 1)"""
    if select_branch(channel) is not CvBranch.SYMMETRIC:
        raise QrlDomainError(
            f"arms differ (eta_a={channel.eta_a!r}, eta_b={channel.eta_b!r}), use the asymmetric form"
        )
    chi = equivalent_noise(channel, dev, CvBranch.SYMMETRIC)
    if chi <= 4.0:
        raise QrlModelDomainError(f"symmetric formula needs chi > 4, got {chi!r}")
    return safe_log2(EULER**2 * (chi - 4.0) * (dev.phi + 1.0) / 16.0) - h_function(chi / 2.0 - 1.0)


def cv_key_rate(channel: ChannelPair, dev: CvDeviceParams) -> CvRateBreakdown:
    """secret key rate per channel use; negative values are kept"""
    branch = select_branch(channel)
    chi = equivalent_noise(channel, dev, branch)
    i_ab = mutual_info_ab(chi, dev)
    if branch is CvBranch.SYMMETRIC:
        i_e = eve_info_symmetric(channel, dev)
    else:
        i_e = eve_info_asymmetric(channel, dev)
    return CvRateBreakdown(chi=chi, i_ab=i_ab, i_e=i_e, rate=dev.xi * i_ab - i_e, branch=branch)
