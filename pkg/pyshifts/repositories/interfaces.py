"""Repository interfaces (abstract base classes).

Scenarios come in and reports go out through these contracts, so the runner
never touches the filesystem directly.
"""

from abc import ABC, abstractmethod

from pyshifts.config import Scenario
from pyshifts.domain import Report


class IScenarioRepository(ABC):
    """Abstract repository for scenario access."""

    @abstractmethod
    def load(self, name: str) -> Scenario:
        """Load a scenario.

        Args:
            name: Scenario identifier (a file path or a preset name)

        Returns:
            The validated scenario

        Raises:
            ScenarioError: If the scenario is missing or malformed
        """
        pass

    @abstractmethod
    def exists(self, name: str) -> bool:
        """Check if a scenario exists.

        Args:
            name: Scenario identifier

        Returns:
            True if the scenario can be loaded, False otherwise
        """
        pass

    @abstractmethod
    def list(self) -> list[str]:
        """List the identifiers of every available scenario."""
        pass


class IReportRepository(ABC):
    """Abstract repository for report persistence."""

    @abstractmethod
    def save(self, name: str, report: Report) -> None:
        """Save a report.

        Args:
            name: Report identifier (a file path for file-backed repositories)
            report: The report to save
        """
        pass

    @abstractmethod
    def load(self, name: str) -> Report | None:
        """Load a report.

        Args:
            name: Report identifier

        Returns:
            Report if found, None otherwise
        """
        pass

    @abstractmethod
    def exists(self, name: str) -> bool:
        """Check if a report exists."""
        pass
