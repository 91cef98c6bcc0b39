# Copyright 2024 qkdratelab contributors

"""The two optical arms (Alice to relay, Bob to relay) and loss/length/transmittance conversions"""

import math
from dataclasses import dataclass
from enum import Enum

from .common import ZERO_TOLERANCE, QrlDomainError, require_finite

DEFAULT_ALPHA_DB_PER_KM = 0.2


class Scenario(str, Enum):
    """where the relay sits between the users"""

    ASYMMETRIC = "asymmetric"  # relay co-located with Alice
    SYMMETRIC = "symmetric"  # relay in the middle

    @classmethod
    def parse(cls, value) -> "Scenario":
        """accepts the enum, its value or a short alias"""
        if isinstance(value, cls):
            return value
        text = str(value).strip().lower()
        aliases = {"asym": cls.ASYMMETRIC, "relay-at-alice": cls.ASYMMETRIC, "sym": cls.SYMMETRIC}
        if text in aliases:
            return aliases[text]
        try:
            return cls(text)
        except ValueError as exc:
            raise QrlDomainError(f"unknown scenario {value!r}") from exc


@dataclass(frozen=True)
class FiberSpec:
    """fiber with a constant loss coefficient (dB/km)"""

    alpha: float = DEFAULT_ALPHA_DB_PER_KM

    def __post_init__(self):
        alpha = require_finite("alpha", self.alpha)
        if alpha <= 0.0:
            raise QrlDomainError(f"fiber loss coefficient must be positive, got {alpha!r}")

    def loss_db(self, length_km: float) -> float:
        """loss of a fiber span"""
        length_km = require_finite("fiber length", length_km)
        if length_km < 0.0:
            raise QrlDomainError(f"fiber length must be non-negative, got {length_km!r}")
        return self.alpha * length_km

    def distance_km(self, loss_db: float) -> float:
        """fiber length that accumulates the given loss"""
        return require_finite("loss", loss_db) / self.alpha


def transmittance_from_loss(loss_db: float) -> float:
    """power transmittance 10^(-loss/10) of a loss given in dB"""
    loss_db = require_finite("loss", loss_db)
    if loss_db < 0.0:
        raise QrlDomainError(f"loss must be non-negative, got {loss_db!r} dB")
    return min(1.0, 10.0 ** (-loss_db / 10.0))


def loss_from_transmittance(eta: float) -> float:
    """loss in dB of a transmittance in (0, 1]"""
    eta = require_finite("transmittance", eta)
    if not 0.0 < eta <= 1.0:
        raise QrlDomainError(f"transmittance must be within (0, 1], got {eta!r}")
    return abs(10.0 * math.log10(eta))


@dataclass(frozen=True)
class ChannelPair:
    """transmittances of the Alice->relay and Bob->relay arms"""

    eta_a: float
    eta_b: float

    def __post_init__(self):
        for name in ("eta_a", "eta_b"):
            value = require_finite(name, getattr(self, name))
            if 1.0 < value <= 1.0 + ZERO_TOLERANCE:
                value = 1.0
            if not 0.0 < value <= 1.0:
                raise QrlDomainError(f"{name} must be within (0, 1], got {value!r}")
            object.__setattr__(self, name, value)

    @property
    def product(self) -> float:
        """overall transmittance between the users"""
        return self.eta_a * self.eta_b

    @property
    def total_loss_db(self) -> float:
        """sum of both arm losses"""
        return loss_from_transmittance(self.eta_a) + loss_from_transmittance(self.eta_b)

    def swapped(self) -> "ChannelPair":
        """the same link with the users' roles exchanged"""
        return ChannelPair(self.eta_b, self.eta_a)


def channel_from_total_loss(total_loss_db: float, scenario) -> ChannelPair:
    """distributes a total system loss over the arms according to the relay placement"""
    scenario = Scenario.parse(scenario)
    total_loss_db = require_finite("total loss", total_loss_db)
    if total_loss_db < 0.0:
        raise QrlDomainError(f"total loss must be non-negative, got {total_loss_db!r} dB")
    if scenario is Scenario.ASYMMETRIC:
        return ChannelPair(1.0, transmittance_from_loss(total_loss_db))
    eta = transmittance_from_loss(total_loss_db / 2.0)
    return ChannelPair(eta, eta)


def channel_from_distances(l_a: float, l_b: float, fiber: FiberSpec = FiberSpec()) -> ChannelPair:
    """arm transmittances from the two fiber lengths (km)"""
    return ChannelPair(transmittance_from_loss(fiber.loss_db(l_a)), transmittance_from_loss(fiber.loss_db(l_b)))


def channel_from_total_distance(distance_km: float, scenario, fiber: FiberSpec = FiberSpec()) -> ChannelPair:
    """like channel_from_total_loss with the user-to-user fiber length as input"""
    return channel_from_total_loss(fiber.loss_db(distance_km), scenario)
