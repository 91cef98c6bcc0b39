# Copyright 2024 qkdratelab contributors

"""Deterministic signal intensity optimisation for the DV key rate:
a log-spaced coarse grid followed by Nelder-Mead refinements in an unbounded
variable that the logistic function maps onto the log(mu) box"""

import math
from dataclasses import dataclass
from logging import getLogger
from typing import List, Tuple

import numpy as np
from scipy.optimize import minimize
from scipy.special import expit, logit

from .channel import ChannelPair
from .common import LOGGER_NAME, QrlDomainError, eet
from .dv_model import DvDeviceParams, Intensities, dv_rate_grid


@dataclass(frozen=True)
class OptimizerConfig:
    """search box, grid resolution and refinement budget"""

    mu_min: float = 1e-4
    mu_max: float = 1.0
    grid_points: int = 40
    refine_iterations: int = 200
    refine_tolerance: float = 1e-10
    seed: int = 0
    restarts: int = 0  # extra seeded random starts of the refinement

    def __post_init__(self):
        if not 0.0 < self.mu_min < self.mu_max or not math.isfinite(self.mu_max):
            raise QrlDomainError(f"need 0 < mu_min < mu_max, got {self.mu_min!r}, {self.mu_max!r}")
        if self.grid_points < 2:
            raise QrlDomainError(f"grid_points must be >= 2, got {self.grid_points!r}")
        if self.refine_iterations < 0 or self.restarts < 0:
            raise QrlDomainError("refine_iterations and restarts must be non-negative")
        if not self.refine_tolerance > 0.0:
            raise QrlDomainError(f"refine_tolerance must be positive, got {self.refine_tolerance!r}")

    def grid(self) -> np.ndarray:
        """log-spaced intensities of one grid axis"""
        return np.clip(np.geomspace(self.mu_min, self.mu_max, self.grid_points), self.mu_min, self.mu_max)


@dataclass(frozen=True)
class Optimum:
    """best intensities found; positive is False when no positive rate exists in the box"""

    mu: Intensities
    rate: float
    evaluations: int
    grid_rate: float

    @property
    def positive(self) -> bool:
        """the optimum yields a secret key"""
        return self.rate > 0.0


# Nelder-Mead restarts from its own result, each with half the previous simplex
_REFINE_ROUNDS = 4


class _BoxObjective:
    """negative DV rate of an unbounded point z, where log(mu) = low + (high - low) * expit(z)"""

    def __init__(self, channel: ChannelPair, dev: DvDeviceParams, cfg: OptimizerConfig):
        self._channel = channel
        self._dev = dev
        self.low = math.log(cfg.mu_min)
        self.high = math.log(cfg.mu_max)
        self._cfg = cfg

    def unbounded(self, log_mu, margin: float) -> np.ndarray:
        """inverse map of a log-space point, kept a fraction margin away from the box edges"""
        fraction = (np.asarray(log_mu, dtype=float) - self.low) / (self.high - self.low)
        return logit(np.clip(fraction, margin, 1.0 - margin))

    def intensities(self, point) -> Tuple[float, float]:
        """intensities of an unbounded point, always inside the box"""
        log_mu = self.low + (self.high - self.low) * expit(np.asarray(point, dtype=float))
        mu_a, mu_b = np.clip(np.exp(log_mu), self._cfg.mu_min, self._cfg.mu_max)
        return float(mu_a), float(mu_b)

    def rate(self, mu_a: float, mu_b: float) -> float:
        """signed rate, -inf where the model is degenerate"""
        return float(dv_rate_grid(self._channel, self._dev, mu_a, mu_b))

    def __call__(self, point) -> float:
        value = self.rate(*self.intensities(point))
        return -value if math.isfinite(value) else math.inf


def _refine(objective: _BoxObjective, start, step: float, cfg: OptimizerConfig) -> Tuple[float, float, float, int]:
    # width of one grid cell as a fraction of the box
    cell = step / (objective.high - objective.low)
    point = objective.unbounded(start, 0.5 * cell)
    best = objective(point)
    evaluations = 1
    for _ in range(_REFINE_ROUNDS):
        slope = expit(point) * (1.0 - expit(point))
        widths = cell / np.maximum(slope, 0.5 * cell)
        simplex = np.array([point, point + [widths[0], 0.0], point + [0.0, widths[1]]])
        result = minimize(
            objective,
            point,
            method="Nelder-Mead",
            options={
                "maxiter": cfg.refine_iterations,
                "xatol": 1e-8,
                "fatol": cfg.refine_tolerance,
                "initial_simplex": simplex,
            },
        )
        evaluations += int(result.nfev)
        gain = best - float(result.fun)
        if float(result.fun) < best:
            point, best = np.asarray(result.x, dtype=float), float(result.fun)
        if not gain > cfg.refine_tolerance:
            break
        cell *= 0.5
    mu_a, mu_b = objective.intensities(point)
    return objective.rate(mu_a, mu_b), mu_a, mu_b, evaluations


@eet
def optimize_intensities(
    channel: ChannelPair, dev: DvDeviceParams, cfg: OptimizerConfig = OptimizerConfig()
) -> Optimum:
    """maximises the signed DV rate over (mu_a, mu_b) in [mu_min, mu_max]^2"""
    logger = getLogger(LOGGER_NAME)
    axis = cfg.grid()
    rates = dv_rate_grid(channel, dev, axis[:, None], axis[None, :])
    # argmax keeps the first maximum: smallest mu_a, then smallest mu_b
    best_a, best_b = np.unravel_index(int(np.argmax(rates)), rates.shape)
    grid_rate = float(rates[best_a, best_b])
    best: List = [grid_rate, float(axis[best_a]), float(axis[best_b])]
    evaluations = cfg.grid_points**2
    logger.debug("grid best %.6g at mu=(%.4g, %.4g) for %s", grid_rate, best[1], best[2], channel)

    if cfg.refine_iterations > 0:
        objective = _BoxObjective(channel, dev, cfg)
        step = (objective.high - objective.low) / (cfg.grid_points - 1)
        starts = [np.log([best[1], best[2]])]
        rng = np.random.default_rng(cfg.seed)
        starts += [rng.uniform(objective.low, objective.high, size=2) for _ in range(cfg.restarts)]
        for start in starts:
            rate, mu_a, mu_b, nfev = _refine(objective, start, step, cfg)
            evaluations += nfev
            if rate > best[0]:
                best = [rate, mu_a, mu_b]

    optimum = Optimum(Intensities(best[1], best[2], cfg.mu_max), best[0], evaluations, grid_rate)
    if not optimum.positive:
        logger.info("no positive DV rate in the search box for %s (best %.6g)", channel, optimum.rate)
    return optimum
