# Copyright 2024 qkdratelab contributors

"""description of a serialised rate row for DiffSync"""

from typing import Optional

from diffsync import DiffSyncModel

ROW_ATTRIBUTES = ("total_loss_db", "eta_a", "eta_b", "rate_signed", "rate_clamped", "mu_a", "mu_b", "status")


class RateRecord(DiffSyncModel):
    """one CSV row; compared as text so any change in the 12 digits shows"""

    _modelname = "rate"

    # identifies the same row among different series: "<file>:<abscissa>"
    _identifiers = ("id",)

    # check modifications on these columns:
    _attributes = ROW_ATTRIBUTES
    id: str
    total_loss_db: Optional[str]
    eta_a: Optional[str]
    eta_b: Optional[str]
    rate_signed: Optional[str]
    rate_clamped: Optional[str]
    mu_a: Optional[str]
    mu_b: Optional[str]
    status: Optional[str]
