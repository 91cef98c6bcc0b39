#!/usr/bin/env python3

# Copyright 2024 qkdratelab contributors

""" rate lab's entry point"""

import sys
from argparse import ArgumentDefaultsHelpFormatter, ArgumentParser, Namespace
from logging import INFO, FileHandler, basicConfig, getLogger
from os import path
from time import strftime
from typing import Any, Dict, List, Optional

from .bounds import tgw_bound
from .common import (
    CV,
    DV,
    LOGGER_NAME,
    QrlBracketError,
    QrlDomainError,
    QrlModelDomainError,
    QrlUndefinedRatio,
    QrlValidationError,
)
from .compare import comparer_for
from .config import CONFIG_KEYS, RunConfig, load_config_file, parse_assignments
from .console import print_breakdown, print_comparison
from .cv_model import cv_key_rate
from .dv_model import dv_key_rate
from .figures import DEFAULT_ETA_D_SET, parse_eta_d_set, parse_figures, reproduce
from .optimizer import optimize_intensities
from .report import plot_series, series_to_csv, write_fields_csv, write_series_csv
from .sweep import efficiency_threshold, find_cutoff, run_sweep

try:
    from .version import __version__
except ImportError:  # not installed, setuptools_scm did not write version.py
    __version__ = "0+unknown"

EXIT_OK = 0
EXIT_DIFFERENCES = 1
EXIT_VALIDATION = 2
EXIT_MODEL_DOMAIN = 3
EXIT_IO = 4


def _add_config_arguments(parser: ArgumentParser):
    parser.add_argument("-c", "--config", help="flat 'key = value' configuration file; flags override its values")
    parser.add_argument(
        "--set",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="override any configuration key, applied after the other flags",
    )
    group = parser.add_argument_group("configuration keys")
    for key in CONFIG_KEYS:
        if key.name == "optimize":
            group.add_argument(key.flag, dest=key.name, action="store_const", const="true", help=key.help)
        else:
            group.add_argument(key.flag, dest=key.name, help=f"{key.help} (default: {key.default})")


def _parse_command_line(argv: Optional[List[str]] = None) -> Namespace:
    parser = ArgumentParser(
        description="Secret key rates of DV and CV measurement-device-independent QKD over lossy links",
        formatter_class=ArgumentDefaultsHelpFormatter,
    )

    parser.add_argument("-v", "--version", action="version", version=f"%(prog)s {__version__}")

    parser.add_argument("-l", "--log-level", type=int, default=30, help="logging level")

    parser.add_argument("--log-dir", action="store", default=None, help="log directory (no log file when absent)")

    commands = parser.add_subparsers(dest="command", required=True)

    point = commands.add_parser("point", help="evaluate one model at one channel and print every rate term")
    _add_config_arguments(point)
    point.set_defaults(func=cmd_point)

    sweep = commands.add_parser("sweep", help="rate versus total loss or distance, as CSV")
    _add_config_arguments(sweep)
    sweep.set_defaults(func=cmd_sweep)

    cutoff = commands.add_parser("cutoff", help="total loss where the rate drops to zero")
    _add_config_arguments(cutoff)
    cutoff.set_defaults(func=cmd_cutoff)

    efficiency = commands.add_parser("efficiency", help="CV relay detection efficiency below which no key remains")
    _add_config_arguments(efficiency)
    efficiency.set_defaults(func=cmd_efficiency)

    figures = commands.add_parser("reproduce", help="write the CSV and SVG files of the comparison figures")
    _add_config_arguments(figures)
    figures.add_argument("--figure", default="all", help="comma separated list of 1a,1b,1c,1d,2a,2b or 'all'")
    figures.add_argument("--outdir", default=".", help="output directory")
    figures.add_argument(
        "--eta-d-set",
        default=",".join(f"{eta:g}" for eta in DEFAULT_ETA_D_SET),
        help="CV relay detection efficiencies of figures 2a and 2b",
    )
    figures.add_argument("--no-svg", action="store_true", help="write the CSV files only")
    figures.set_defaults(func=cmd_reproduce)

    compare = commands.add_parser("compare", help="compare rate CSV files (or directories of them) with golden ones")
    compare.add_argument("old", help="golden CSV file or directory")
    compare.add_argument("new", help="CSV file or directory to check")
    compare.set_defaults(func=cmd_compare)

    args = parser.parse_args(argv)
    getLogger(LOGGER_NAME).info(args)
    return args


def _config(args: Namespace) -> RunConfig:
    file_values = load_config_file(args.config) if args.config else {}
    flags = {key.name: getattr(args, key.name, None) for key in CONFIG_KEYS}
    return RunConfig.from_sources(file_values, flags, parse_assignments(args.set))


def cmd_point(args: Namespace) -> int:
    """prints the rate breakdown of one model at one channel"""
    cfg = _config(args)
    channel = cfg.channel()
    values: Dict[str, Any] = {
        "model": cfg.model,
        "total_loss_db": channel.total_loss_db,
        "eta_a": channel.eta_a,
        "eta_b": channel.eta_b,
    }
    if cfg.model == DV:
        dev = cfg.dv_params()
        mu = cfg.intensities()
        if cfg.optimize:
            optimum = optimize_intensities(channel, dev, cfg.optimizer_config())
            mu = optimum.mu
            values["evaluations"] = optimum.evaluations
        dv = dv_key_rate(channel, dev, mu)
        values.update(mu_a=mu.mu_a, mu_b=mu.mu_b, p11=dv.p11, y11=dv.y11, e11x=dv.e11x)
        values.update(gain_z=dv.gain_z, qber_z=dv.qber_z, rate=dv.rate, secure_rate=dv.secure_rate)
    elif cfg.model == CV:
        cv = cv_key_rate(channel, cfg.cv_params())
        values.update(branch=cv.branch.value, chi=cv.chi, i_ab=cv.i_ab, i_e=cv.i_e)
        values.update(rate=cv.rate, secure_rate=cv.secure_rate)
    else:
        values.update(rate=tgw_bound(channel))

    print_breakdown(f"{cfg.model.upper()} key rate", values)
    if cfg.output:
        write_fields_csv(values, cfg.output)
    return EXIT_OK


def cmd_sweep(args: Namespace) -> int:
    """writes a rate series as CSV (stdout without --output) and optionally an SVG plot"""
    cfg = _config(args)
    spec = cfg.sweep_spec()
    series = run_sweep(spec)
    if cfg.output:
        write_series_csv(series, cfg.output)
    else:
        sys.stdout.write(series_to_csv(series))
    if cfg.svg:
        plot_series([series], cfg.svg, spec.name)
    return EXIT_OK


def _bracket_report(exc: QrlBracketError) -> str:
    low, high = exc.bracket
    if exc.reason == QrlBracketError.BEYOND:
        return f"beyond bracket: rate still positive at {high:g} dB (searched [{low:g}, {high:g}] dB)"
    return f"non-positive rate at origin ({low:g} dB), no bracket"


def cmd_cutoff(args: Namespace) -> int:
    """prints the zero-rate total loss in dB and km"""
    cfg = _config(args)
    try:
        loss = find_cutoff(
            cfg.model, cfg.scenario, cfg.dv_params(), cfg.cv_params(), cfg.optimizer_config(), cfg.bracket
        )
    except QrlBracketError as exc:
        print(_bracket_report(exc))
        return EXIT_OK
    print(f"{loss:.4g} dB ({cfg.fiber.distance_km(loss):.4g} km @{cfg.alpha:g} dB/km)")
    return EXIT_OK


def cmd_efficiency(args: Namespace) -> int:
    """prints the CV relay detection efficiency threshold at the configured loss"""
    cfg = _config(args)
    loss = cfg.loss_db or 0.0
    try:
        eta_d = efficiency_threshold(cfg.cv_params(), cfg.scenario, loss)
    except QrlBracketError as exc:
        low, high = exc.bracket
        print(f"no threshold within efficiencies [{low:g}, {high:g}] at {loss:g} dB")
        return EXIT_OK
    print(f"eta_d = {eta_d:.4f} at {loss:g} dB ({cfg.scenario})")
    return EXIT_OK


def cmd_reproduce(args: Namespace) -> int:
    """writes the figure bundles"""
    cfg = _config(args)
    names = parse_figures(args.figure)
    eta_d_set = parse_eta_d_set(args.eta_d_set)
    for written in reproduce(names, cfg, args.outdir, eta_d_set, svg=not args.no_svg):
        print(written)
    return EXIT_OK


def cmd_compare(args: Namespace) -> int:
    """0 when the new series equal the golden ones, 1 otherwise"""
    comparer = comparer_for(args.old, args.new)
    comparer.compare()
    print_comparison(comparer)
    return EXIT_OK if comparer.identical else EXIT_DIFFERENCES


def _setup_logging(args: Namespace):
    basicConfig(format="%(asctime)s %(levelname)s:%(message)s", level=INFO)
    logger = getLogger(LOGGER_NAME)
    logger.setLevel(args.log_level)

    if args.log_dir is not None:
        file_handler = FileHandler(strftime(path.join(args.log_dir, "qkdratelab_%Y_%m_%d_%H_%M_%S.log")))
        logger.addHandler(file_handler)
        logger.propagate = False  # do not further propagate to the root handler (stdout)


def run(argv: Optional[List[str]] = None) -> int:
    """parses the command line, runs the sub-command and maps errors to exit codes"""
    args = _parse_command_line(argv)
    logger = getLogger(LOGGER_NAME)
    try:
        _setup_logging(args)
        return args.func(args)
    except QrlValidationError as exc:
        logger.error("invalid configuration: %s", exc)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (QrlModelDomainError, QrlDomainError, QrlUndefinedRatio) as exc:
        logger.error("outside the model domain: %s", exc)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MODEL_DOMAIN
    except OSError as exc:
        logger.error("i/o: %s", exc)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


def main():
    """entry point for the rate lab"""
    sys.exit(run())


if __name__ == "__main__":
    main()
