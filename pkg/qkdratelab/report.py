# Copyright 2024 qkdratelab contributors

"""CSV serialisation of rate series and SVG line plots"""

import csv
import io
import math
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Union

import matplotlib

matplotlib.use("Agg")

# pylint: disable=wrong-import-position
import matplotlib.pyplot as plt  # noqa: E402

from .sweep import Axis, RateSeries  # noqa: E402

# pylint: enable=wrong-import-position

CSV_HEADER = ["abscissa", "total_loss_db", "eta_a", "eta_b", "rate_signed", "rate_clamped", "mu_a", "mu_b", "status"]
INVALID = "invalid"
SIGNIFICANT_DIGITS = 12

PLOT_Y_RANGE = (1e-8, 10.0)
AXIS_LABELS = {Axis.TOTAL_LOSS_DB: "total system loss (dB)", Axis.DISTANCE_KM: "distance (km)"}

# fixed ids and no timestamp make the SVG output reproducible
matplotlib.rcParams["svg.hashsalt"] = "qkdratelab"

PathLike = Union[str, Path]


def format_number(value: Optional[float]) -> str:
    """12 significant digits, locale independent; empty for missing values"""
    if value is None:
        return ""
    return f"{value:.{SIGNIFICANT_DIGITS}g}"


def parse_number(text: str) -> Optional[float]:
    """inverse of format_number; the invalid sentinel and empty cells become None"""
    if text in ("", INVALID):
        return None
    return float(text)


def series_rows(series: RateSeries) -> List[List[str]]:
    """the serialised cells of every row"""
    rows = []
    for row in series.rows:
        rows.append(
            [
                format_number(row.abscissa),
                format_number(row.total_loss_db),
                format_number(row.eta_a),
                format_number(row.eta_b),
                INVALID if row.rate_signed is None else format_number(row.rate_signed),
                format_number(row.rate_clamped),
                format_number(row.mu_a),
                format_number(row.mu_b),
                row.status,
            ]
        )
    return rows


def series_to_csv(series: RateSeries) -> str:
    """CSV text with header, LF line endings"""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    writer.writerows(series_rows(series))
    return buffer.getvalue()


def write_series_csv(series: RateSeries, path: PathLike) -> Path:
    """writes the series as UTF-8 CSV"""
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as fp:
        fp.write(series_to_csv(series))
    return path


def read_csv_rows(path: PathLike) -> List[Dict[str, str]]:
    """raw cells of a CSV file written by write_series_csv"""
    with open(path, "r", encoding="utf-8", newline="") as fp:
        return list(csv.DictReader(fp))


def read_series_csv(path: PathLike) -> List[Dict[str, Optional[float]]]:
    """numeric columns parsed back to floats; status kept as text"""
    parsed = []
    for cells in read_csv_rows(path):
        row: Dict = {key: parse_number(value) for key, value in cells.items() if key != "status"}
        row["status"] = cells.get("status", "")
        parsed.append(row)
    return parsed


def write_fields_csv(fields: Mapping[str, object], path: PathLike) -> Path:
    """a single-row CSV of named values (point breakdowns)"""
    path = Path(path)
    cells = [format_number(v) if isinstance(v, float) else str(v) for v in fields.values()]
    with open(path, "w", encoding="utf-8", newline="") as fp:
        writer = csv.writer(fp, lineterminator="\n")
        writer.writerow(list(fields.keys()))
        writer.writerow(cells)
    return path


def plot_series(series_list: Iterable[RateSeries], path: PathLike, title: str = "") -> Path:
    """log-y SVG with one polyline per series; non-positive and invalid points are left out"""
    path = Path(path)
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    axis = Axis.TOTAL_LOSS_DB
    for series in series_list:
        axis = series.spec.axis
        rates = series.clamped_rates()
        rates[~(rates > 0.0)] = math.nan
        ax.plot(series.abscissae(), rates, label=series.spec.name)
    ax.set_yscale("log")
    ax.set_ylim(*PLOT_Y_RANGE)
    ax.set_xlabel(AXIS_LABELS[axis])
    ax.set_ylabel("secret key rate (bits/use)")
    if title:
        ax.set_title(title)
    ax.grid(True, which="both", linewidth=0.3)
    ax.legend(loc="upper right")
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path
