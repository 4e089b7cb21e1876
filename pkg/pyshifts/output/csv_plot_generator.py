"""Plot-ready CSV output generator implementation."""

import logging
from fractions import Fraction
from pathlib import Path
from typing import Any

try:
    import pandas as pd
except ImportError as _pandas_err:
    raise ImportError(
        "pandas is required for CsvPlotGenerator. Install with: pip install 'pyshifts[output]'"
    ) from _pandas_err

from pyshifts.domain import Report

from .interfaces import IOutputGenerator

logger = logging.getLogger(__name__)

# table name -> (entry kind, columns)
TABLES: dict[str, tuple[str, tuple[str, ...]]] = {
    "bounds": (
        "branch",
        ("vector", "k", "j", "case", "bound", "oracle.infimum", "oracle.argmin_m"),
    ),
    "defects": ("line", ("vector", "n", "delta", "length", "defect", "margin", "valid")),
    "partial_sums": ("partial_sums", ("n0", "m", "S+", "S-", "bound_plus", "bound_minus")),
}


def _number(value: Any) -> Any:
    """JSON scalar to a plottable number: ``"p/q"`` strings become floats."""
    if isinstance(value, str):
        if value == "inf":
            return float("inf")
        try:
            return float(Fraction(value))
        except ValueError:
            return value
    if isinstance(value, dict) and set(value) == {"re", "im"}:
        return abs(complex(_number(value["re"]), _number(value["im"])))
    return value


def _lookup(entry: dict[str, Any], dotted: str) -> Any:
    value: Any = entry
    for part in dotted.split("."):
        if not isinstance(value, dict) or part not in value:
            return None
        value = value[part]
    return _number(value)


class CsvPlotGenerator(IOutputGenerator):
    """Flattens report entries into one CSV per plot.

    ``bounds`` holds the certified tolerance of each branch vector against
    ``(k, j)``, ``defects`` the membership chain defects against the tolerance
    and ``partial_sums`` the criterion partial sums against ``m``.  Tables
    without rows are not written.
    """

    def __init__(self, report: Report, output_dir: Path):
        """Initialize CSV generator.

        Args:
            report: Finished report
            output_dir: Directory the CSV files are written to
        """
        self.report = report
        self.output_dir = output_dir

    def generate(self) -> Path:
        doc = self.report.to_json()
        stem = f"{doc['scenario']}_{doc['command']}"
        self.output_dir.mkdir(parents=True, exist_ok=True)
        for table, (kind, columns) in TABLES.items():
            frame = self.build_frame(doc["entries"], kind, columns)
            if frame.empty:
                continue
            file_path = self.output_dir / f"{stem}_{table}.csv"
            try:
                frame.to_csv(file_path, index=False)
                logger.info(f"Saved {len(frame)} {table} rows to {file_path}")
            except OSError as e:
                logger.error(f"Failed to save CSV to {file_path}: {e}")
                raise OSError(f"Failed to save CSV to {file_path}: {e}") from e
        return self.output_dir

    @staticmethod
    def build_frame(
        entries: list[dict[str, Any]], kind: str, columns: tuple[str, ...]
    ) -> pd.DataFrame:
        """Rows of one entry kind with the given (dotted) columns."""
        rows = [
            {column: _lookup(entry, column) for column in columns}
            for entry in entries
            if entry.get("kind") == kind
        ]
        return pd.DataFrame(rows, columns=list(columns))
