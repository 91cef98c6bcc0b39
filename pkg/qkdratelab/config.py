# Copyright 2024 qkdratelab contributors

"""Run configuration: built-in defaults, a flat `key = value` file and command-line overrides"""

import math
from dataclasses import dataclass, fields
from logging import getLogger
from pathlib import Path
from typing import Any, Callable, Dict, Iterable, Mapping, Optional, Tuple

from .channel import ChannelPair, FiberSpec, Scenario, channel_from_distances, channel_from_total_loss
from .common import LOGGER_NAME, MODELS, QrlDomainError, QrlValidationError, to_bool
from .cv_model import CvDeviceParams
from .dv_model import DvDeviceParams, Intensities
from .optimizer import OptimizerConfig
from .sweep import Axis, SweepSpec

Check = Callable[[Any], Optional[str]]


def _float(text: str) -> float:
    value = float(text)
    if math.isnan(value):
        raise ValueError("nan")
    return value


def _bool(text: str) -> bool:
    if text.lower() not in ["true", "t", "1", "yes", "y", "on", "false", "f", "0", "no", "n", "off"]:
        raise ValueError(text)
    return to_bool(text)


def _choice(*choices: str) -> Callable[[str], str]:
    def parse(text: str) -> str:
        text = text.strip().lower()
        if text not in choices:
            raise ValueError(f"expected one of {', '.join(choices)}")
        return text

    return parse


def _scenario(text: str) -> str:
    try:
        return Scenario.parse(text).value
    except QrlDomainError as exc:
        raise ValueError(str(exc)) from exc


def _within(low: float, high: float, low_open=False, high_open=False) -> Check:
    def check(value) -> Optional[str]:
        if value is None:
            return None
        too_low = value <= low if low_open else value < low
        too_high = value >= high if high_open else value > high
        if too_low or too_high:
            return f"must be within {'(' if low_open else '['}{low:g}, {high:g}{')' if high_open else ']'}"
        return None

    return check


def _at_least(low: float, open_=False) -> Check:
    return _within(low, math.inf, low_open=open_)


@dataclass(frozen=True)
class ConfigKey:
    """one tunable: parser, validator and help text"""

    name: str
    parse: Callable[[str], Any]
    default: Any
    check: Optional[Check]
    help: str

    @property
    def flag(self) -> str:
        """command-line flag of the key"""
        return "--" + self.name.replace("_", "-")


CONFIG_KEYS: Tuple[ConfigKey, ...] = (
    ConfigKey("model", _choice(*MODELS), "dv", None, "rate model: dv, cv or tgw"),
    ConfigKey("scenario", _scenario, "symmetric", None, "relay placement: asymmetric or symmetric"),
    ConfigKey("axis", _choice(*(a.value for a in Axis)), "loss", None, "sweep abscissa: loss (dB) or distance (km)"),
    ConfigKey("start", _float, 0.0, _at_least(0.0), "first sweep abscissa"),
    ConfigKey("stop", _float, 6.0, _at_least(0.0), "last sweep abscissa"),
    ConfigKey("points", int, 61, _at_least(2), "number of sweep points"),
    ConfigKey("alpha", _float, 0.2, _at_least(0.0, True), "fiber loss coefficient (dB/km)"),
    ConfigKey("loss_db", _float, None, _at_least(0.0), "total system loss of a point evaluation (dB)"),
    ConfigKey("l_a", _float, None, _at_least(0.0), "Alice to relay fiber length (km)"),
    ConfigKey("l_b", _float, None, _at_least(0.0), "Bob to relay fiber length (km)"),
    ConfigKey("mu_a", _float, 0.5, _within(0.0, 1e6, low_open=True), "Alice's signal intensity"),
    ConfigKey("mu_b", _float, 0.5, _within(0.0, 1e6, low_open=True), "Bob's signal intensity"),
    ConfigKey("optimize", _bool, False, None, "optimise the DV signal intensities"),
    ConfigKey("dv_eta_d", _float, 0.93, _within(0.0, 1.0, low_open=True), "DV detector efficiency"),
    ConfigKey("dv_e_d", _float, 0.001, _within(0.0, 0.5), "DV misalignment error rate"),
    ConfigKey("dv_y0", _float, 1e-6, _within(0.0, 1.0, high_open=True), "DV background (dark count) rate"),
    ConfigKey("dv_f_e", _float, 1.16, _at_least(1.0), "DV error correction inefficiency"),
    ConfigKey("cv_eta_d", _float, 0.98, _within(0.0, 1.0, low_open=True), "CV relay detection efficiency"),
    ConfigKey("cv_epsilon", _float, 0.01, _at_least(0.0), "CV excess noise (SNU)"),
    ConfigKey("cv_phi", _float, 60.0, _at_least(0.0, True), "CV modulation variance (SNU)"),
    ConfigKey("cv_xi", _float, 0.97, _within(0.0, 1.0, low_open=True), "CV reconciliation efficiency"),
    ConfigKey("mu_min", _float, 1e-4, _at_least(0.0, True), "lower edge of the intensity search box"),
    ConfigKey("mu_max", _float, 1.0, _at_least(0.0, True), "upper edge of the intensity search box"),
    ConfigKey("grid_points", int, 40, _at_least(2), "coarse grid points per intensity axis"),
    ConfigKey("refine_iterations", int, 200, _at_least(0), "Nelder-Mead iteration budget"),
    ConfigKey("refine_tolerance", _float, 1e-10, _at_least(0.0, True), "Nelder-Mead rate tolerance"),
    ConfigKey("seed", int, 0, _at_least(0), "seed of the random restarts"),
    ConfigKey("restarts", int, 0, _at_least(0), "extra random Nelder-Mead starts"),
    ConfigKey("bracket_low", _float, 0.0, _at_least(0.0), "lower end of the cutoff bracket (dB)"),
    ConfigKey("bracket_high", _float, 40.0, _at_least(0.0), "upper end of the cutoff bracket (dB)"),
    ConfigKey("output", str, None, None, "CSV output path (sweep: stdout when absent)"),
    ConfigKey("svg", str, None, None, "SVG plot output path"),
)

KEYS_BY_NAME: Dict[str, ConfigKey] = {key.name: key for key in CONFIG_KEYS}


def parse_config_text(text: str) -> Dict[str, str]:
    """raw values of a flat `key = value` text; `#` starts a comment"""
    values = {}
    for number, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise QrlValidationError(f"line {number}", f"expected 'key = value', got {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        values[key] = value
    return values


def load_config_file(path) -> Dict[str, str]:
    """raw values of a config file; OSError propagates"""
    return parse_config_text(Path(path).read_text(encoding="utf-8"))


def parse_assignments(assignments: Iterable[str]) -> Dict[str, str]:
    """raw values of `key=value` command-line assignments"""
    values = {}
    for assignment in assignments:
        if "=" not in assignment:
            raise QrlValidationError(assignment, "expected key=value")
        key, value = (part.strip() for part in assignment.split("=", 1))
        values[key] = value
    return values


def _convert(key: str, value: Any) -> Any:
    if key not in KEYS_BY_NAME:
        raise QrlValidationError(key, "unknown configuration key")
    spec = KEYS_BY_NAME[key]
    if value is None:
        return spec.default
    if isinstance(value, str):
        try:
            value = spec.parse(value)
        except ValueError as exc:
            raise QrlValidationError(key, f"cannot parse {value!r}: {exc}") from exc
    if spec.check is not None:
        problem = spec.check(value)
        if problem:
            raise QrlValidationError(key, f"{problem}, got {value!r}")
    return value


@dataclass(frozen=True)
class RunConfig:  # pylint: disable=too-many-instance-attributes
    """every tunable of a run, validated"""

    model: str = "dv"
    scenario: str = "symmetric"
    axis: str = "loss"
    start: float = 0.0
    stop: float = 6.0
    points: int = 61
    alpha: float = 0.2
    loss_db: Optional[float] = None
    l_a: Optional[float] = None
    l_b: Optional[float] = None
    mu_a: float = 0.5
    mu_b: float = 0.5
    optimize: bool = False
    dv_eta_d: float = 0.93
    dv_e_d: float = 0.001
    dv_y0: float = 1e-6
    dv_f_e: float = 1.16
    cv_eta_d: float = 0.98
    cv_epsilon: float = 0.01
    cv_phi: float = 60.0
    cv_xi: float = 0.97
    mu_min: float = 1e-4
    mu_max: float = 1.0
    grid_points: int = 40
    refine_iterations: int = 200
    refine_tolerance: float = 1e-10
    seed: int = 0
    restarts: int = 0
    bracket_low: float = 0.0
    bracket_high: float = 40.0
    output: Optional[str] = None
    svg: Optional[str] = None

    @classmethod
    def from_sources(cls, *sources: Mapping[str, Any]) -> "RunConfig":
        """merges sources, later ones win; None values do not override"""
        merged: Dict[str, Any] = {}
        for source in sources:
            for key, value in source.items():
                if key not in KEYS_BY_NAME:
                    raise QrlValidationError(key, "unknown configuration key")
                if value is not None:
                    merged[key] = value
        converted = {key: _convert(key, merged.get(key)) for key in KEYS_BY_NAME}
        cfg = cls(**converted)
        cfg.validate()
        getLogger(LOGGER_NAME).debug("run configuration: %s", cfg)
        return cfg

    def validate(self):
        """cross-key checks"""
        if not self.mu_min < self.mu_max:
            raise QrlValidationError("mu_min", f"must be below mu_max ({self.mu_max!r}), got {self.mu_min!r}")
        for key in ("mu_a", "mu_b"):
            if getattr(self, key) > self.mu_max:
                raise QrlValidationError(key, f"must not exceed mu_max ({self.mu_max!r})")
        if not self.bracket_low < self.bracket_high:
            raise QrlValidationError("bracket_low", "must be below bracket_high")
        if (self.l_a is None) != (self.l_b is None):
            raise QrlValidationError("l_a" if self.l_a is None else "l_b", "give both fiber lengths or neither")

    def as_dict(self) -> Dict[str, Any]:
        """every key with its value"""
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @property
    def fiber(self) -> FiberSpec:
        """fiber of distance conversions"""
        return FiberSpec(self.alpha)

    def dv_params(self) -> DvDeviceParams:
        """DV device parameters"""
        return DvDeviceParams(self.dv_eta_d, self.dv_e_d, self.dv_y0, self.dv_f_e)

    def cv_params(self) -> CvDeviceParams:
        """CV device parameters"""
        return CvDeviceParams(self.cv_eta_d, self.cv_epsilon, self.cv_phi, self.cv_xi)

    def optimizer_config(self) -> OptimizerConfig:
        """intensity search settings"""
        return OptimizerConfig(
            self.mu_min,
            self.mu_max,
            self.grid_points,
            self.refine_iterations,
            self.refine_tolerance,
            self.seed,
            self.restarts,
        )

    def intensities(self) -> Intensities:
        """fixed signal intensities of a point evaluation"""
        return Intensities(self.mu_a, self.mu_b, self.mu_max)

    def channel(self) -> ChannelPair:
        """channel of a point evaluation, from the fiber lengths or the total loss"""
        if self.l_a is not None and self.l_b is not None:
            return channel_from_distances(self.l_a, self.l_b, self.fiber)
        if self.loss_db is None:
            raise QrlValidationError("loss_db", "a point needs loss_db or both l_a and l_b")
        return channel_from_total_loss(self.loss_db, self.scenario)

    @property
    def bracket(self) -> Tuple[float, float]:
        """cutoff search bracket (dB)"""
        return (self.bracket_low, self.bracket_high)

    def sweep_spec(self, label: str = "") -> SweepSpec:
        """the sweep described by this configuration"""
        return SweepSpec(
            self.model,
            self.scenario,
            self.start,
            self.stop,
            self.points,
            Axis(self.axis),
            self.fiber,
            self.dv_params(),
            self.cv_params(),
            self.optimizer_config(),
            label,
        )
