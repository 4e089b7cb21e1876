"""JSON implementation of the report repository."""

import json
import logging
from pathlib import Path

from pyshifts.domain import Report

from .interfaces import IReportRepository

logger = logging.getLogger(__name__)


def dump_report(report: Report) -> str:
    """Deterministic JSON text of a report (sorted keys, trailing newline)."""
    return json.dumps(report.to_json(), sort_keys=True, indent=2) + "\n"


class JsonReportRepository(IReportRepository):
    """Writes reports as JSON files under a base directory."""

    def __init__(self, base_path: Path | None = None):
        """Initialize repository with the report directory.

        Args:
            base_path: Directory relative names are resolved against
        """
        self.base_path = base_path or Path.cwd()

    def save(self, name: str, report: Report) -> None:
        file_path = self._get_file_path(name)
        try:
            file_path.parent.mkdir(parents=True, exist_ok=True)
            file_path.write_text(dump_report(report), encoding="utf-8")
            logger.info(f"Saved {report.command} report to {file_path}")
        except OSError as e:
            logger.error(f"Failed to save report to {file_path}: {e}")
            raise OSError(f"Failed to save report to {file_path}: {e}") from e

    def load(self, name: str) -> Report | None:
        file_path = self._get_file_path(name)
        if not file_path.exists():
            logger.debug(f"Report file not found: {file_path}")
            return None
        try:
            return Report.from_json(json.loads(file_path.read_text(encoding="utf-8")))
        except (OSError, ValueError, KeyError) as e:
            logger.error(f"Failed to load report from {file_path}: {e}")
            raise OSError(f"Failed to load report from {file_path}: {e}") from e

    def exists(self, name: str) -> bool:
        return self._get_file_path(name).exists()

    def _get_file_path(self, name: str) -> Path:
        path = Path(name)
        return path if path.is_absolute() else self.base_path / path
