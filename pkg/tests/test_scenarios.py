"""Tests for scenario parsing, hashing and the preset catalog.

Covers:
- Reading TOML scenarios through the repository
- Field paths and line numbers in scenario errors
- Canonical hashing and overrides
- Preset catalog and in-memory repository
"""

from fractions import Fraction
from pathlib import Path

import pytest

from pyshifts.config import (
    Scenario,
    build_classical_scenario,
    build_comb_scenario,
    build_default_catalog,
    build_grid_scenario,
    scenario_from_dict,
)
from pyshifts.domain import (
    ClassicalWeights,
    Line,
    Lp,
    ProductSeminorms,
    ScalarMode,
    ScenarioError,
    TruncationParams,
    WeightAssignment,
)
from pyshifts.repositories import InMemoryScenarioRepository, TomlScenarioRepository

SCENARIO_DIR = Path(__file__).resolve().parent.parent / "scenarios"

COMB_TOML = """\
name = "comb"
family = "comb"

[weights]
mu1 = "2"
mu2 = "4"

[constructions]
deltas = ["1/10", "1/100"]
line_range = [-3, 3]

[certify]
k_max = 4
search = true
"""


def _write_scenario(tmp_path: Path, text: str, name: str = "scenario.toml") -> Path:
    """Helper to write a scenario file."""
    file_path = tmp_path / name
    file_path.write_text(text, encoding="utf-8")
    return file_path


def _comb_doc(**changes) -> dict:
    """Helper to create a minimal comb scenario document."""
    doc = {"name": "comb", "family": "comb", "weights": {"mu1": "2", "mu2": "4"}}
    doc.update(changes)
    return doc


# ===================================================================
# TOML files
# ===================================================================


class TestTomlScenarioRepository:
    """Test loading scenarios from TOML files."""

    def test_load_comb_scenario(self, tmp_path: Path) -> None:
        _write_scenario(tmp_path, COMB_TOML)
        scenario = TomlScenarioRepository(tmp_path).load("scenario.toml")
        assert scenario.family == "comb"
        assert scenario.weights.mu1 == 2
        assert scenario.deltas == (Fraction(1, 10), Fraction(1, 100))
        assert scenario.line_range == (-3, 3)
        assert scenario.search
        assert scenario.norm == Lp(2)

    def test_file_matches_the_preset(self, tmp_path: Path) -> None:
        _write_scenario(tmp_path, COMB_TOML)
        scenario = TomlScenarioRepository(tmp_path).load("scenario.toml")
        assert scenario.scenario_hash() == build_comb_scenario().scenario_hash()

    def test_absolute_path(self, tmp_path: Path) -> None:
        file_path = _write_scenario(tmp_path, COMB_TOML)
        scenario = TomlScenarioRepository(Path("/nonexistent")).load(str(file_path))
        assert scenario.name == "comb"

    def test_shipped_scenarios_load(self) -> None:
        repo = TomlScenarioRepository(SCENARIO_DIR)
        names = [n for n in repo.list() if n.endswith(".toml")]
        assert "comb.toml" in names
        for name in names:
            assert repo.load(name).name == name.removesuffix(".toml")

    def test_shipped_grid_scenario(self) -> None:
        scenario = TomlScenarioRepository(SCENARIO_DIR).load("grid.toml")
        assert scenario.weights.grid_weights.name == "default"
        assert scenario.scenario_hash() == build_grid_scenario().scenario_hash()

    def test_shipped_product_seminorms(self) -> None:
        scenario = TomlScenarioRepository(SCENARIO_DIR).load("classical-frechet.toml")
        assert isinstance(scenario.norm, ProductSeminorms)
        assert scenario.norm.exhaustion[0] == frozenset({Line(1), Line(2)})

    def test_classical_tables(self, tmp_path: Path) -> None:
        _write_scenario(
            tmp_path,
            'name = "dilation"\nfamily = "classical"\n\n[classical]\nkind = "bilateral"\n'
            'right = { values = ["2"], start = 0 }\nleft = { values = ["2"], start = -1 }\n',
        )
        scenario = TomlScenarioRepository(tmp_path).load("scenario.toml")
        assert scenario.classical == ClassicalWeights.constant("bilateral", 2)

    def test_invalid_toml_reports_the_line(self, tmp_path: Path) -> None:
        _write_scenario(tmp_path, 'name = "broken"\nfamily = "comb"\nseed = \n')
        with pytest.raises(ScenarioError, match="Invalid TOML") as exc:
            TomlScenarioRepository(tmp_path).load("scenario.toml")
        assert exc.value.line == 3

    def test_missing_file(self, tmp_path: Path) -> None:
        with pytest.raises(OSError, match="Failed to read scenario"):
            TomlScenarioRepository(tmp_path).load("missing.toml")

    def test_exists_and_list(self, tmp_path: Path) -> None:
        _write_scenario(tmp_path, COMB_TOML, "b.toml")
        _write_scenario(tmp_path, COMB_TOML, "a.toml")
        repo = TomlScenarioRepository(tmp_path, build_default_catalog())
        assert repo.exists("a.toml")
        assert not repo.exists("c.toml")
        assert repo.exists("preset:grid")
        assert repo.list()[:2] == ["a.toml", "b.toml"]
        assert "preset:classical-dilation" in repo.list()

    def test_presets_need_a_catalog(self, tmp_path: Path) -> None:
        with pytest.raises(ScenarioError, match="No preset catalog"):
            TomlScenarioRepository(tmp_path).load("preset:comb")


# ===================================================================
# Field validation
# ===================================================================


class TestScenarioFields:
    """Test that malformed fields are reported with their dotted path."""

    @pytest.mark.parametrize(
        ("changes", "field"),
        [
            ({"family": "star"}, "family"),
            ({"mode": "fixed"}, "mode"),
            ({"seed": "seven"}, "seed"),
            ({"weights": {"mu1": "abc", "mu2": "4"}}, "weights.mu1"),
            ({"weights": {"mu1": "4", "mu2": "2"}}, "weights"),
            ({"constructions": {"line_range": [3]}}, "constructions.line_range"),
            ({"constructions": {"line_range": [3, 1]}}, "constructions.line_range"),
            ({"constructions": {"deltas": ["-1/10"]}}, "constructions.deltas"),
            ({"certify": {"k_max": "four"}}, "certify.k_max"),
            ({"certify": "yes"}, "certify"),
            ({"oracle": {"horizon": 0}}, "oracle.horizon"),
            ({"window": {"n_min": -3}}, "window"),
            ({"norm": {"kind": "weird"}}, "norm"),
        ],
    )
    def test_field_path(self, changes: dict, field: str) -> None:
        with pytest.raises(ScenarioError) as exc:
            scenario_from_dict(_comb_doc(**changes))
        assert exc.value.field == field
        assert f"[field: {field}]" in str(exc.value)

    def test_missing_family(self) -> None:
        with pytest.raises(ScenarioError, match="Missing required field") as exc:
            scenario_from_dict({"name": "nothing"})
        assert exc.value.field == "family"

    def test_classical_kind_is_required(self) -> None:
        with pytest.raises(ScenarioError) as exc:
            scenario_from_dict({"family": "classical", "classical": {}})
        assert exc.value.field == "classical.kind"

    def test_comb_scenario_needs_weights(self) -> None:
        with pytest.raises(ScenarioError, match="need mu1 and mu2"):
            Scenario(name="bare", family="comb")

    def test_window_is_parsed(self) -> None:
        window = {"n_min": -5, "n_max": 2, "k_max": 5}
        scenario = scenario_from_dict(_comb_doc(window=window))
        assert scenario.base_window == TruncationParams(-5, 2, 5)


# ===================================================================
# Hashing and overrides
# ===================================================================


class TestScenarioIdentity:
    """Test the canonical hash and command-line overrides."""

    def test_hash_is_stable(self) -> None:
        first = build_comb_scenario().scenario_hash()
        assert first == build_comb_scenario().scenario_hash()
        assert len(first) == 64

    def test_hash_sees_every_field(self) -> None:
        base = build_comb_scenario()
        assert base.scenario_hash() != build_comb_scenario(deltas=("1/10",)).scenario_hash()
        assert base.scenario_hash() != base.with_overrides(seed=1).scenario_hash()

    def test_no_override_returns_the_same_scenario(self) -> None:
        scenario = build_comb_scenario()
        assert scenario.with_overrides() is scenario
        assert scenario.with_overrides(seed=0, mode=ScalarMode.EXACT) is scenario

    def test_seed_override(self) -> None:
        scenario = build_comb_scenario().with_overrides(seed=5)
        assert scenario.seed == 5
        assert scenario.weights == build_comb_scenario().weights

    def test_override_keeps_comb_without_grid_matrix(self) -> None:
        scenario = build_comb_scenario().with_overrides(seed=5)
        assert scenario.weights.grid is None
        assert scenario.to_json()["weights"]["grid"] is None

    def test_weights_without_grid_round_trip(self) -> None:
        weights = build_comb_scenario().weights
        assert WeightAssignment.from_json(weights.to_json()) == weights

    def test_override_keeps_the_grid_matrix(self) -> None:
        scenario = build_grid_scenario().with_overrides(seed=2)
        assert scenario.weights.grid == build_grid_scenario().weights.grid
        assert scenario.weights.grid.name == "default"

    def test_mode_override_converts_weights(self) -> None:
        scenario = build_grid_scenario().with_overrides(mode=ScalarMode.FLOAT)
        assert scenario.mode is ScalarMode.FLOAT
        assert scenario.weights.mode is ScalarMode.FLOAT
        assert scenario.weights.mu2 == 4.0
        assert scenario.deltas == (0.1, 0.01)

    def test_mode_override_for_classical_weights(self) -> None:
        scenario = build_classical_scenario("unilateral", "1/2").with_overrides(
            mode=ScalarMode.FLOAT
        )
        assert scenario.classical.mode is ScalarMode.FLOAT
        assert scenario.classical.weight(7) == 0.5


# ===================================================================
# Presets
# ===================================================================


class TestPresets:
    """Test the preset catalog."""

    def test_catalog_names(self) -> None:
        names = build_default_catalog().names()
        assert names == sorted(names)
        assert {"comb", "grid", "classical-dilation", "classical-zero-pattern"} <= set(names)

    def test_every_preset_builds(self) -> None:
        catalog = build_default_catalog()
        for name in catalog.names():
            assert catalog.get(name).name == name

    def test_unknown_preset(self) -> None:
        with pytest.raises(ScenarioError, match="Unknown preset") as exc:
            build_default_catalog().get("nope")
        assert exc.value.field == "preset"

    def test_base_windows(self) -> None:
        assert build_comb_scenario().base_window == TruncationParams(-4, 1, 4)
        assert build_grid_scenario().base_window == TruncationParams(-4, 1, 4, -2, 2)
        unilateral = build_classical_scenario("unilateral", 2)
        assert unilateral.base_window == TruncationParams(1, 40)

    def test_in_memory_repository(self) -> None:
        repo = InMemoryScenarioRepository(build_default_catalog())
        custom = build_classical_scenario("bilateral", 3, name="custom")
        repo.add(custom)
        assert repo.load("custom") is custom
        assert repo.load("grid").family == "grid"
        assert repo.exists("comb")
        assert "custom" in repo.list()

    def test_in_memory_repository_without_catalog(self) -> None:
        with pytest.raises(ScenarioError, match="Unknown scenario"):
            InMemoryScenarioRepository().load("comb")
