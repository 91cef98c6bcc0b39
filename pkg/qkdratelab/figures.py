# Copyright 2024 qkdratelab contributors

"""Reproduction bundles of the DV versus CV comparison figures"""

from dataclasses import dataclass, replace
from logging import getLogger
from pathlib import Path
from typing import Dict, Iterable, List, Sequence, Tuple

from .channel import Scenario
from .common import CV, DV, LOGGER_NAME, QrlValidationError, eet
from .config import RunConfig
from .report import plot_series, write_series_csv
from .sweep import RateSeries, SweepSpec, run_sweep

DEFAULT_ETA_D_SET = (0.98, 0.95, 0.90, 0.88, 0.86)


@dataclass(frozen=True)
class FigureBundle:
    """one figure: scenario, loss range and whether it compares models or CV detector efficiencies"""

    name: str
    scenario: Scenario
    stop: float
    points: int
    efficiency_scan: bool = False

    @property
    def title(self) -> str:
        """plot title"""
        what = "CV rate vs relay detection efficiency" if self.efficiency_scan else "DV vs CV"
        return f"{what}, {self.scenario.value} relay"


FIGURES: Dict[str, FigureBundle] = {
    "1a": FigureBundle("1a", Scenario.ASYMMETRIC, 6.0, 61),
    "1b": FigureBundle("1b", Scenario.ASYMMETRIC, 1.5, 31),
    "1c": FigureBundle("1c", Scenario.SYMMETRIC, 6.0, 61),
    "1d": FigureBundle("1d", Scenario.SYMMETRIC, 1.5, 31),
    "2a": FigureBundle("2a", Scenario.ASYMMETRIC, 6.0, 61, efficiency_scan=True),
    "2b": FigureBundle("2b", Scenario.SYMMETRIC, 2.0, 41, efficiency_scan=True),
}


def parse_figures(text: str) -> List[str]:
    """comma separated figure names, or 'all'"""
    names = [name.strip().lower() for name in text.split(",") if name.strip()]
    if names == ["all"]:
        return list(FIGURES)
    unknown = [name for name in names if name not in FIGURES]
    if unknown or not names:
        raise QrlValidationError("figure", f"unknown figure(s) {unknown or text!r}; choose from {', '.join(FIGURES)}")
    return names


def parse_eta_d_set(text: str) -> Tuple[float, ...]:
    """comma separated detection efficiencies within (0, 1]"""
    try:
        values = tuple(float(value) for value in text.split(",") if value.strip())
    except ValueError as exc:
        raise QrlValidationError("eta_d_set", str(exc)) from exc
    if not values or any(not 0.0 < value <= 1.0 for value in values):
        raise QrlValidationError("eta_d_set", f"need efficiencies within (0, 1], got {text!r}")
    return values


def bundle_specs(bundle: FigureBundle, cfg: RunConfig, eta_d_set: Iterable[float]) -> List[Tuple[str, SweepSpec]]:
    """(file stem, sweep) pairs of a figure"""
    base = replace(cfg, scenario=bundle.scenario.value, axis="loss", start=0.0, stop=bundle.stop, points=bundle.points)
    if bundle.efficiency_scan:
        specs = []
        for eta_d in eta_d_set:
            stem = f"fig{bundle.name}_cv_eta{eta_d:.2f}"
            specs.append((stem, replace(base, model=CV, cv_eta_d=eta_d).sweep_spec(f"CV eta_d={eta_d:.2f}")))
        return specs
    return [
        (f"fig{bundle.name}_{model}", replace(base, model=model).sweep_spec(f"{model.upper()}-MDI-QKD"))
        for model in (DV, CV)
    ]


@eet
def reproduce(
    names: Sequence[str],
    cfg: RunConfig,
    outdir,
    eta_d_set: Iterable[float] = DEFAULT_ETA_D_SET,
    svg: bool = True,
) -> List[Path]:
    """sweeps every series of the named figures into outdir; returns the written files"""
    logger = getLogger(LOGGER_NAME)
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    eta_d_set = tuple(eta_d_set)
    written = []
    for name in names:
        bundle = FIGURES[name]
        series: List[RateSeries] = []
        for stem, spec in bundle_specs(bundle, cfg, eta_d_set):
            series.append(run_sweep(spec))
            written.append(write_series_csv(series[-1], outdir / f"{stem}.csv"))
        if svg:
            written.append(plot_series(series, outdir / f"fig{name}.svg", bundle.title))
        logger.info("figure %s: %d series", name, len(series))
    return written
