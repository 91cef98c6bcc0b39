# Copyright 2024 qkdratelab contributors

"""Fundamental (TGW) upper bound on the key rate per optical mode of a lossy channel"""

import math

from .channel import ChannelPair
from .common import QrlDomainError, require_finite


def tgw_bound_from_transmittance(eta: float) -> float:
    """log2((1 + eta) / (1 - eta)); math.inf at eta == 1"""
    eta = require_finite("transmittance", eta)
    if not 0.0 <= eta <= 1.0:
        raise QrlDomainError(f"transmittance must be within [0, 1], got {eta!r}")
    if eta == 1.0:
        return math.inf
    return math.log2((1.0 + eta) / (1.0 - eta))


def tgw_bound(channel: ChannelPair) -> float:
    """bound for the end-to-end transmittance eta_a * eta_b of a relay link"""
    return tgw_bound_from_transmittance(channel.product)
