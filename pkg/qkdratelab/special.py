# Copyright 2024 qkdratelab contributors

"""Scalar special functions shared by the rate models"""

import math

import numpy as np
from scipy import special

from .common import QrlDomainError, require_finite

LN2 = math.log(2.0)

# I0(x) - 1 switches from its power series to the library I0 at this argument
_I0M1_SERIES_LIMIT = 1.0
_I0M1_SERIES_TERMS = 20


def safe_log2(x: float) -> float:
    """log2 that refuses non-positive arguments instead of returning nan/-inf"""
    x = require_finite("log2 argument", x)
    if x <= 0.0:
        raise QrlDomainError(f"log2 of non-positive value {x!r}")
    return math.log2(x)


def binary_entropy(p: float) -> float:
    """binary Shannon entropy H2(p) in bits, with 0*log2(0) = 0"""
    p = require_finite("probability", p)
    if not 0.0 <= p <= 1.0:
        raise QrlDomainError(f"probability must be within [0, 1], got {p!r}")
    return float((special.entr(p) + special.entr(1.0 - p)) / LN2)


def binary_entropy_array(p):
    """vectorised H2 for the grid search; arguments are clipped into [0, 1]"""
    p = np.clip(np.asarray(p, dtype=float), 0.0, 1.0)
    return (special.entr(p) + special.entr(1.0 - p)) / LN2


def h_function(x: float) -> float:
    """the bosonic entropy function h(x) of a thermal state with symplectic eigenvalue x >= 1"""
    x = require_finite("h argument", x)
    if x < 1.0:
        raise QrlDomainError(f"h(x) needs x >= 1, got {x!r}")
    upper = (x + 1.0) / 2.0
    lower = (x - 1.0) / 2.0
    return float((special.xlogy(upper, upper) - special.xlogy(lower, lower)) / LN2)


def bessel_i0(x: float) -> float:
    """modified Bessel function of the first kind, order zero"""
    x = require_finite("I0 argument", x)
    if x < 0.0:
        raise QrlDomainError(f"I0 argument must be non-negative, got {x!r}")
    return float(special.i0(x))


def bessel_i0m1(x):
    """I0(x) - 1 without the cancellation of the naive difference at small x.

    Accepts scalars or numpy arrays; returns the same kind."""
    x = np.asarray(x, dtype=float)
    quarter = np.minimum(x, _I0M1_SERIES_LIMIT) ** 2 / 4.0
    term = np.ones_like(quarter)
    series = np.zeros_like(quarter)
    for k in range(1, _I0M1_SERIES_TERMS + 1):
        term = term * quarter / (k * k)
        series = series + term
    out = np.where(x < _I0M1_SERIES_LIMIT, series, special.i0(x) - 1.0)
    return out if out.ndim else float(out)
