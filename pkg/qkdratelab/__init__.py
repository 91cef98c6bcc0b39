# Copyright 2024 qkdratelab contributors

"""Secret key rates of DV and CV measurement-device-independent QKD over lossy links"""

import sys

from .bounds import tgw_bound, tgw_bound_from_transmittance
from .channel import ChannelPair, FiberSpec, Scenario, channel_from_distances, channel_from_total_loss
from .common import (
    QrlBracketError,
    QrlDegenerateInput,
    QrlDomainError,
    QrlError,
    QrlModelDomainError,
    QrlUndefinedRatio,
    QrlValidationError,
)
from .cv_model import CvDeviceParams, cv_key_rate
from .dv_model import DvDeviceParams, Intensities, dv_key_rate
from .optimizer import OptimizerConfig, optimize_intensities
from .sweep import SweepSpec, find_cutoff, run_sweep

assert sys.version_info >= (3, 8)
