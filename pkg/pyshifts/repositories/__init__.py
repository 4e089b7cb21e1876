"""Repository interfaces and implementations for scenarios and reports.

Scenarios are read from TOML files or the preset catalog; reports are written
as deterministic JSON.  In-memory implementations back the tests.
"""

from .in_memory_repositories import InMemoryReportRepository, InMemoryScenarioRepository
from .interfaces import IReportRepository, IScenarioRepository
from .json_report_repository import JsonReportRepository, dump_report
from .toml_scenario_repository import PRESET_PREFIX, TomlScenarioRepository

__all__ = [
    "IReportRepository",
    "IScenarioRepository",
    "InMemoryReportRepository",
    "InMemoryScenarioRepository",
    "JsonReportRepository",
    "PRESET_PREFIX",
    "TomlScenarioRepository",
    "dump_report",
]
