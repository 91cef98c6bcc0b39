# Copyright 2024 qkdratelab contributors

"""Rate versus loss/distance series, zero-crossings and rate ratios"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import partial
from logging import getLogger
from typing import Optional, Tuple

import numpy as np
from scipy.optimize import bisect

from .bounds import tgw_bound
from .channel import ChannelPair, FiberSpec, Scenario, channel_from_total_loss
from .common import (
    LOGGER_NAME,
    QrlBracketError,
    QrlDomainError,
    QrlUndefinedRatio,
    QrlValidationError,
    eet,
    worker_count,
)
from .cv_model import CvDeviceParams, cv_key_rate
from .dv_model import DvDeviceParams
from .optimizer import OptimizerConfig, optimize_intensities

CUTOFF_TOLERANCE_DB = 1e-4
DEFAULT_CUTOFF_BRACKET = (0.0, 40.0)

STATUS_OK = "ok"
STATUS_NO_POSITIVE = "no-positive-rate"
STATUS_INVALID = "invalid"


class Model(str, Enum):
    """rate model of a series"""

    DV = "dv"
    CV = "cv"
    TGW = "tgw"


class Axis(str, Enum):
    """abscissa of a series"""

    TOTAL_LOSS_DB = "loss"
    DISTANCE_KM = "distance"


@dataclass(frozen=True)
class SweepSpec:
    """what to sweep and over which grid"""

    model: Model
    scenario: Scenario
    start: float
    stop: float
    points: int
    axis: Axis = Axis.TOTAL_LOSS_DB
    fiber: FiberSpec = FiberSpec()
    dv: Optional[DvDeviceParams] = None
    cv: Optional[CvDeviceParams] = None
    optimizer: Optional[OptimizerConfig] = None
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "model", Model(self.model))
        object.__setattr__(self, "scenario", Scenario.parse(self.scenario))
        object.__setattr__(self, "axis", Axis(self.axis))
        if not (math.isfinite(self.start) and math.isfinite(self.stop)):
            raise QrlValidationError("start", "start and stop must be finite")
        if self.start < 0.0:
            raise QrlValidationError("start", f"must be non-negative, got {self.start!r}")
        if not self.start < self.stop:
            raise QrlValidationError("start", f"start ({self.start!r}) must be below stop ({self.stop!r})")
        if self.points < 2:
            raise QrlValidationError("points", f"need at least 2 points, got {self.points!r}")
        if self.model is Model.TGW and self.start <= 0.0:
            # the bound diverges at zero loss
            raise QrlValidationError("start", "the TGW bound needs start > 0")
        if self.model is Model.DV and self.dv is None:
            raise QrlValidationError("dv", "DV sweeps need DV device parameters")
        if self.model is Model.CV and self.cv is None:
            raise QrlValidationError("cv", "CV sweeps need CV device parameters")

    def abscissae(self) -> np.ndarray:
        """the evaluation grid, ascending"""
        return np.linspace(self.start, self.stop, self.points)

    def total_loss_db(self, abscissa: float) -> float:
        """total system loss at a grid point"""
        if self.axis is Axis.DISTANCE_KM:
            return self.fiber.loss_db(abscissa)
        return float(abscissa)

    @property
    def name(self) -> str:
        """label, or a name derived from model and scenario"""
        return self.label or f"{self.model.value}_{self.scenario.value}"


@dataclass(frozen=True)
class RateRow:
    """one evaluated sweep point; rate_signed is None where the model is invalid"""

    abscissa: float
    total_loss_db: float
    eta_a: float
    eta_b: float
    rate_signed: Optional[float]
    mu_a: Optional[float] = None
    mu_b: Optional[float] = None
    status: str = STATUS_OK
    detail: str = ""

    @property
    def rate_clamped(self) -> Optional[float]:
        """max(rate, 0), None for invalid points"""
        return None if self.rate_signed is None else max(self.rate_signed, 0.0)


@dataclass(frozen=True)
class RateSeries:
    """ordered sweep output"""

    spec: SweepSpec
    rows: Tuple[RateRow, ...] = field(default_factory=tuple)

    def abscissae(self) -> np.ndarray:
        """x values of all rows"""
        return np.array([row.abscissa for row in self.rows])

    def clamped_rates(self) -> np.ndarray:
        """clamped rates with nan at invalid rows"""
        return np.array([math.nan if row.rate_clamped is None else row.rate_clamped for row in self.rows])


def _optimizer(optimizer: Optional[OptimizerConfig]) -> OptimizerConfig:
    return OptimizerConfig() if optimizer is None else optimizer


def evaluate_point(spec: SweepSpec, abscissa: float) -> RateRow:
    """evaluates the spec's model at one grid point"""
    total_loss = spec.total_loss_db(abscissa)
    channel = channel_from_total_loss(total_loss, spec.scenario)
    row = partial(RateRow, float(abscissa), total_loss, channel.eta_a, channel.eta_b)
    if spec.model is Model.DV:
        optimum = optimize_intensities(channel, spec.dv, _optimizer(spec.optimizer))
        status = STATUS_OK if optimum.positive else STATUS_NO_POSITIVE
        return row(optimum.rate, optimum.mu.mu_a, optimum.mu.mu_b, status)
    if spec.model is Model.CV:
        try:
            return row(cv_key_rate(channel, spec.cv).rate)
        except QrlDomainError as exc:
            getLogger(LOGGER_NAME).info("CV model invalid at %.6g: %s", abscissa, exc)
            return row(None, status=STATUS_INVALID, detail=str(exc))
    return row(tgw_bound(channel))


@eet
def run_sweep(spec: SweepSpec) -> RateSeries:
    """evaluates every grid point; points run concurrently, rows keep grid order"""
    workers = worker_count()
    evaluate = partial(evaluate_point, spec)
    if workers == 1:
        rows = [evaluate(x) for x in spec.abscissae()]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(evaluate, spec.abscissae()))
    getLogger(LOGGER_NAME).info("swept %s: %d points with %d workers", spec.name, len(rows), workers)
    return RateSeries(spec, tuple(rows))


def signed_rate(
    model,
    channel: ChannelPair,
    dv: Optional[DvDeviceParams] = None,
    cv: Optional[CvDeviceParams] = None,
    optimizer: Optional[OptimizerConfig] = None,
) -> float:
    """signed rate of a model at a channel, DV intensities optimised"""
    model = Model(model)
    if model is Model.DV:
        return optimize_intensities(channel, dv or DvDeviceParams(), _optimizer(optimizer)).rate
    if model is Model.CV:
        return cv_key_rate(channel, cv or CvDeviceParams()).rate
    return tgw_bound(channel)


def _bisect_sign_change(fun, bracket: Tuple[float, float], tolerance: float, what: str) -> float:
    """root of fun on bracket where fun(low) > 0 >= fun(high)"""
    low, high = bracket
    if not 0.0 <= low < high:
        raise QrlValidationError("bracket", f"need 0 <= low < high, got {bracket!r}")
    at_low = fun(low)
    if at_low <= 0.0:
        raise QrlBracketError(f"{what} is non-positive at {low!r}", QrlBracketError.AT_ORIGIN, bracket)
    at_high = fun(high)
    if at_high > 0.0:
        raise QrlBracketError(f"{what} stays positive up to {high!r}", QrlBracketError.BEYOND, bracket)
    if at_high == 0.0:
        return high
    return float(bisect(fun, low, high, xtol=tolerance))


@eet
def find_cutoff(
    model,
    scenario,
    dv: Optional[DvDeviceParams] = None,
    cv: Optional[CvDeviceParams] = None,
    optimizer: Optional[OptimizerConfig] = None,
    bracket: Tuple[float, float] = DEFAULT_CUTOFF_BRACKET,
    tolerance: float = CUTOFF_TOLERANCE_DB,
) -> float:
    """total loss (dB) where the signed rate crosses zero"""
    model = Model(model)
    if model is Model.TGW:
        raise QrlValidationError("model", "the TGW bound is positive at every finite loss")
    scenario = Scenario.parse(scenario)

    def rate_at(loss_db: float) -> float:
        return signed_rate(model, channel_from_total_loss(loss_db, scenario), dv, cv, optimizer)

    cutoff = _bisect_sign_change(rate_at, bracket, tolerance, f"{model.value} rate")
    getLogger(LOGGER_NAME).info("%s %s cutoff at %.6f dB", model.value, scenario.value, cutoff)
    return cutoff


def advantage_ratio(
    loss_db: float,
    cv: CvDeviceParams,
    dv: DvDeviceParams,
    scenario,
    optimizer: Optional[OptimizerConfig] = None,
) -> float:
    """R_CV / R_DV(optimised) at a total loss"""
    channel = channel_from_total_loss(loss_db, scenario)
    cv_rate = cv_key_rate(channel, cv).rate
    dv_rate = optimize_intensities(channel, dv, _optimizer(optimizer)).rate
    if cv_rate <= 0.0 or dv_rate <= 0.0:
        raise QrlUndefinedRatio(f"rates must be positive at {loss_db!r} dB (CV {cv_rate!r}, DV {dv_rate!r})")
    return cv_rate / dv_rate


def advantage_crossover(
    cv: CvDeviceParams,
    dv: DvDeviceParams,
    scenario,
    threshold: float = 10.0,
    bracket: Tuple[float, float] = (0.0, 6.0),
    optimizer: Optional[OptimizerConfig] = None,
    tolerance: float = CUTOFF_TOLERANCE_DB,
) -> float:
    """total loss beyond which the CV advantage drops below threshold"""

    def excess(loss_db: float) -> float:
        return advantage_ratio(loss_db, cv, dv, scenario, optimizer) - threshold

    return _bisect_sign_change(excess, bracket, tolerance, f"CV/DV advantage above {threshold!r}")


def efficiency_threshold(
    cv: CvDeviceParams,
    scenario,
    loss_db: float = 0.0,
    bracket: Tuple[float, float] = (0.5, 1.0),
    tolerance: float = 1e-6,
) -> float:
    """relay detection efficiency below which the CV rate is non-positive"""
    channel = channel_from_total_loss(loss_db, scenario)

    def deficit(eta_d: float) -> float:
        # positive below the threshold, so the shared bisection applies
        return -cv_key_rate(channel, replace(cv, eta_d=eta_d)).rate

    return _bisect_sign_change(deficit, bracket, tolerance, "CV rate deficit")


def tgw_gap(
    loss_db: float,
    dv: DvDeviceParams,
    scenario,
    optimizer: Optional[OptimizerConfig] = None,
) -> float:
    """R_TGW / R_DV(optimised) at a total loss"""
    channel = channel_from_total_loss(loss_db, scenario)
    dv_rate = optimize_intensities(channel, dv, _optimizer(optimizer)).rate
    if dv_rate <= 0.0:
        raise QrlUndefinedRatio(f"DV rate is non-positive at {loss_db!r} dB")
    return tgw_bound(channel) / dv_rate
