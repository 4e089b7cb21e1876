"""TOML implementation of the scenario repository."""

import logging
import re
import sys
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from pyshifts.config import Scenario, ScenarioCatalog, scenario_from_dict
from pyshifts.domain import ScenarioError

from .interfaces import IScenarioRepository

logger = logging.getLogger(__name__)

PRESET_PREFIX = "preset:"

_LINE = re.compile(r"at line (\d+)")


class TomlScenarioRepository(IScenarioRepository):
    """Loads scenarios from ``*.toml`` files under a base directory.

    Names are paths, absolute or relative to ``base_path``.  A name of the
    form ``preset:<name>`` is resolved through the preset catalog instead.
    """

    def __init__(self, base_path: Path | None = None, catalog: ScenarioCatalog | None = None):
        """Initialize repository with the scenario directory.

        Args:
            base_path: Directory relative names are resolved against
            catalog: Preset catalog for ``preset:`` names
        """
        self.base_path = base_path or Path.cwd()
        self.catalog = catalog

    def load(self, name: str) -> Scenario:
        if name.startswith(PRESET_PREFIX):
            if self.catalog is None:
                raise ScenarioError("No preset catalog configured", field="scenario")
            return self.catalog.get(name[len(PRESET_PREFIX) :])

        file_path = self._get_file_path(name)
        logger.debug(f"Loading scenario from {file_path}")
        try:
            with file_path.open("rb") as fh:
                doc = tomllib.load(fh)
        except tomllib.TOMLDecodeError as e:
            match = _LINE.search(str(e))
            line = int(match.group(1)) if match else None
            raise ScenarioError(f"Invalid TOML in {file_path}: {e}", line=line) from e
        except OSError as e:
            logger.error(f"Failed to read scenario {file_path}: {e}")
            raise OSError(f"Failed to read scenario {file_path}: {e}") from e

        scenario = scenario_from_dict(doc)
        logger.info(f"Loaded scenario {scenario.name!r} from {file_path}")
        return scenario

    def exists(self, name: str) -> bool:
        if name.startswith(PRESET_PREFIX):
            return self.catalog is not None and name[len(PRESET_PREFIX) :] in self.catalog.names()
        return self._get_file_path(name).is_file()

    def list(self) -> list[str]:
        files = sorted(p.name for p in self.base_path.glob("*.toml"))
        presets = [PRESET_PREFIX + n for n in self.catalog.names()] if self.catalog else []
        return files + presets

    def _get_file_path(self, name: str) -> Path:
        path = Path(name)
        return path if path.is_absolute() else self.base_path / path
