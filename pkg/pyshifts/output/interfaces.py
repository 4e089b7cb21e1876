"""Output generator interfaces."""

from abc import ABC, abstractmethod
from pathlib import Path


class IOutputGenerator(ABC):
    """Abstract interface for output generation.

    Generators turn a finished report into derived files (plot data, summaries)
    without touching the JSON report itself.
    """

    @abstractmethod
    def generate(self) -> Path:
        """Generate output file(s).

        Returns:
            Directory or file the output was written to
        """
        pass
