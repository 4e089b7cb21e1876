"""In-memory repository implementations for presets, tests and library usage."""

from pyshifts.config import Scenario, ScenarioCatalog
from pyshifts.domain import Report, ScenarioError

from .interfaces import IReportRepository, IScenarioRepository


class InMemoryScenarioRepository(IScenarioRepository):
    """Scenario repository backed by a dict, optionally seeded from a preset catalog."""

    def __init__(self, catalog: ScenarioCatalog | None = None) -> None:
        self._store: dict[str, Scenario] = {}
        self._catalog = catalog

    def load(self, name: str) -> Scenario:
        if name in self._store:
            return self._store[name]
        if self._catalog is not None:
            return self._catalog.get(name)
        raise ScenarioError(f"Unknown scenario {name!r}", field="scenario")

    def exists(self, name: str) -> bool:
        in_catalog = self._catalog is not None and name in self._catalog.names()
        return name in self._store or in_catalog

    def list(self) -> list[str]:
        names = set(self._store)
        if self._catalog is not None:
            names.update(self._catalog.names())
        return sorted(names)

    # ------------------------------------------------------------------
    # Convenience helpers (not part of interface)
    # ------------------------------------------------------------------

    def add(self, scenario: Scenario) -> None:
        """Register a scenario under its own name."""
        self._store[scenario.name] = scenario


class InMemoryReportRepository(IReportRepository):
    """Report repository backed by a dict."""

    def __init__(self) -> None:
        self._store: dict[str, Report] = {}

    def save(self, name: str, report: Report) -> None:
        self._store[name] = report

    def load(self, name: str) -> Report | None:
        return self._store.get(name)

    def exists(self, name: str) -> bool:
        return name in self._store
