# Copyright 2024 qkdratelab contributors

"""common constants, exceptions and helper functions"""

import math
from functools import wraps
from logging import getLogger
from os import cpu_count, getenv
from time import time
from typing import Optional

LOGGER_NAME = "QKDRATELAB"

THREADS_ENV = "QKD_RATELAB_THREADS"

# Euler's number; kept apart from the misalignment error rate e_d
EULER = math.e

# absolute tolerance for rounding noise around exact zeros
ZERO_TOLERANCE = 1e-12

# model labels
DV = "dv"
CV = "cv"
TGW = "tgw"
MODELS = (DV, CV, TGW)


def to_bool(value: str) -> bool:
    """interprets given value as true or false"""
    return value is not None and value.lower() in ["true", "t", "1", "yes", "y", "on"]


class QrlError(Exception):
    """base of all rate lab errors"""


class QrlDomainError(QrlError, ValueError):
    """argument outside the mathematical domain of a function"""


class QrlModelDomainError(QrlDomainError):
    """the rate formula leaves its region of validity"""


class QrlDegenerateInput(QrlDomainError):
    """no successful detection events"""


class QrlBracketError(QrlError):
    """no sign change inside a bisection bracket"""

    BEYOND = "beyond-bracket"
    AT_ORIGIN = "non-positive-at-origin"

    def __init__(self, message: str, reason: str, bracket: Optional[tuple] = None):
        super().__init__(message)
        self.reason = reason
        self.bracket = bracket


class QrlUndefinedRatio(QrlError):
    """ratio of rates with a non-positive operand"""


class QrlValidationError(QrlError, ValueError):
    """invalid configuration or sweep specification"""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


def require_finite(name: str, value: float) -> float:
    """returns value as float or raises a domain error naming it"""
    value = float(value)
    if not math.isfinite(value):
        raise QrlDomainError(f"{name} must be finite, got {value!r}")
    return value


def worker_count(default: Optional[int] = None) -> int:
    """number of sweep workers, capped by the QKD_RATELAB_THREADS env. var."""
    if default is None:
        default = min(4, cpu_count() or 1)
    value = getenv(THREADS_ENV, None)
    if value is None:
        return default
    try:
        count = int(value)
    except ValueError:
        getLogger(LOGGER_NAME).warning("ignoring %s=%r (not an integer)", THREADS_ENV, value)
        return default
    return max(1, count)


def eet(fun):
    """Trace enter and exit of callable with timing"""

    @wraps(fun)
    def wrapper(*args, **kwargs):
        logger = getLogger(LOGGER_NAME)

        logger.debug("ENT %s", fun.__name__)

        start = time()
        out = fun(*args, **kwargs)
        duration = time() - start

        if duration < 1e-03:
            duration = f"{int(duration*1000000)}us"
        elif duration < 1:
            duration = f"{int(duration*1000)}ms"
        else:
            duration = f"{int(duration)}s"

        logger.debug("FIN %s", f"{fun.__name__} : {duration}")
        return out

    return wrapper
