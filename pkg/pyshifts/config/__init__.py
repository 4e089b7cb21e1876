"""Configuration module providing verification budgets and scenarios.

Tolerances and search budgets live in an injectable ``VerificationConfig``;
what to verify is described by a ``Scenario``, read from TOML or built from
the preset catalog.
"""

from .scenario_config import (
    Scenario,
    ScenarioCatalog,
    build_classical_scenario,
    build_comb_scenario,
    build_default_catalog,
    build_grid_scenario,
    scenario_from_dict,
)
from .verification_config import VerificationConfig, build_default_config

__all__ = [
    "Scenario",
    "ScenarioCatalog",
    "VerificationConfig",
    "build_classical_scenario",
    "build_comb_scenario",
    "build_default_catalog",
    "build_default_config",
    "build_grid_scenario",
    "scenario_from_dict",
]
