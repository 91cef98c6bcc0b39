# Copyright 2024 qkdratelab contributors

"""A RateRecord dataset from loading one or more series CSV files"""

from logging import getLogger
from pathlib import Path
from typing import List

from diffsync import DiffSync
from diffsync.exceptions import ObjectAlreadyExists

from .common import LOGGER_NAME
from .model import ROW_ATTRIBUTES, RateRecord
from .report import read_csv_rows


def csv_files(location) -> List[Path]:
    """the CSV files of a directory, sorted, or the file itself"""
    location = Path(location)
    if location.is_dir():
        return sorted(location.glob("*.csv"))
    if not location.exists():
        raise FileNotFoundError(f"no such file or directory: {location}")
    return [location]


class SeriesDataset(DiffSync):
    """Load rate rows from CSV files"""

    top_level = ["rate"]
    rate = RateRecord

    def __init__(self, name: str, paths: List[Path], keyed_by_file: bool = True):
        super().__init__(name)
        self._logger = getLogger(LOGGER_NAME)
        self._paths = paths
        self._keyed_by_file = keyed_by_file

    def _make_id(self, path: Path, abscissa: str) -> str:
        return f"{path.name}:{abscissa}" if self._keyed_by_file else abscissa

    def load(self):
        for path in self._paths:
            for cells in read_csv_rows(path):
                abscissa = cells.get("abscissa")
                if not abscissa:
                    self._logger.error("row without abscissa in %s: %s", path, cells)
                    continue
                record = RateRecord(id=self._make_id(path, abscissa), **{k: cells.get(k) for k in ROW_ATTRIBUTES})
                try:
                    self.add(record)
                except ObjectAlreadyExists:
                    self._logger.error("duplicate abscissa %s in %s", abscissa, path)
