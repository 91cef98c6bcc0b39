# Copyright 2024 qkdratelab contributors

"""Difference between an "old" (golden) and a "new" set of rate series"""

from dataclasses import dataclass
from logging import getLogger
from pathlib import Path
from typing import Dict, List, Optional, Set

from diffsync.enum import DiffSyncActions
from diffsync.logging import enable_console_logging

from .common import LOGGER_NAME
from .dataset import SeriesDataset, csv_files
from .model import ROW_ATTRIBUTES, RateRecord


@dataclass
class RowDifference:
    """Holds the difference for a single "old" and "new" row"""

    key: str
    changed: Optional[Set[str]] = None
    old: Optional[Dict[str, str]] = None
    new: Optional[Dict[str, str]] = None


def _values(record: Optional[RateRecord]) -> Optional[Dict[str, str]]:
    if record is None:
        return None
    return {attr: getattr(record, attr) for attr in ROW_ATTRIBUTES}


class SeriesComparer:
    """Difference between "old" and "new" series datasets"""

    def __init__(self, old: SeriesDataset, new: SeriesDataset):
        self._logger = getLogger(LOGGER_NAME)
        self._old = old
        self._new = new

        # rows only in the new series
        self.added: List[RowDifference] = []
        # rows only in the old series
        self.removed: List[RowDifference] = []
        # rows present in both with different values
        self.changed: List[RowDifference] = []
        # rows that are the same
        self.unchanged: List[RowDifference] = []

        # 0 for WARNING logs, 1 for INFO logs, 2 for DEBUG logs
        enable_console_logging(verbosity=0)

    @property
    def identical(self) -> bool:
        """no row was added, removed or changed"""
        return not (self.added or self.removed or self.changed)

    def compare(self):
        """calculates differences"""

        self._old.load()
        self._new.load()

        self.added, self.removed, self.changed, self.unchanged = [], [], [], []

        diff = self._new.diff_to(self._old)
        for element in diff.get_children():
            self._logger.debug("action: %s on %s", element.action, element.name)
            if element.action == DiffSyncActions.CREATE:
                self.added.append(RowDifference(element.name, new=_values(self._new.get(element.type, element.name))))
            elif element.action == DiffSyncActions.DELETE:
                self.removed.append(RowDifference(element.name, old=_values(self._old.get(element.type, element.name))))
            elif element.action == DiffSyncActions.UPDATE:
                changed = set(element.get_attrs_diffs()["+"].keys())
                self.changed.append(
                    RowDifference(
                        element.name,
                        changed,
                        _values(self._old.get(element.type, element.name)),
                        _values(self._new.get(element.type, element.name)),
                    )
                )
            elif element.action is None:
                self.unchanged.append(RowDifference(element.name))
            else:
                raise NotImplementedError(f"Unexpected action: {element.action}")

        self._logger.info("diff.summary: %s", diff.summary())
        return diff.summary()


def comparer_for(old, new) -> SeriesComparer:
    """comparer of two CSV files (rows keyed by abscissa) or two directories (keyed by file and abscissa)"""
    old_paths, new_paths = csv_files(old), csv_files(new)
    keyed_by_file = Path(old).is_dir() or Path(new).is_dir()
    return SeriesComparer(
        SeriesDataset("old", old_paths, keyed_by_file),
        SeriesDataset("new", new_paths, keyed_by_file),
    )
