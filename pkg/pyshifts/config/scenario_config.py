"""Scenario configuration module.

A scenario bundles everything one verification run needs: the operator
family and its weights, the truncation window, the norm, the tolerance grid
and the basis vectors to certify.  Scenarios are read from TOML documents or
built from the presets below.
"""

import hashlib
import json
from collections.abc import Callable, Mapping
from dataclasses import dataclass
from typing import Any

from pyshifts.domain import (
    ClassicalWeights,
    GridWeights,
    Lp,
    NormSpec,
    OpFamily,
    PeriodicTail,
    Scalar,
    ScalarMode,
    ScenarioError,
    TruncationParams,
    WeightAssignment,
    norm_spec_from_json,
    norm_spec_to_json,
)
from pyshifts.domain.scalars import scalar_from_json, scalar_to_json, to_scalar

_FAMILIES = {
    "comb": OpFamily.COMB_SHIFT,
    "grid": OpFamily.GRID_T,
    "classical": OpFamily.CLASSICAL_SHIFT,
}


@dataclass(frozen=True)
class Scenario:
    """One verification scenario.

    Attributes:
        name: Identifier used in reports
        family: ``comb``, ``grid`` or ``classical``
        mode: Scalar mode of every computation
        seed: Seed of the randomized chain search
        weights: ``mu1``/``mu2`` (and grid matrix) for comb and grid scenarios
        classical: Weight sequence for classical scenarios
        window: Base truncation window for certificates
        norm: Norm of the sequence space
        deltas: Tolerances the constructions are run for
        line_range: Inclusive range of line indices ``n`` for ``e_n`` chains
        certify_k_max: Branches ``1..certify_k_max`` are certified
        certify_j_range: Branch depths certified on the grid
        oracle_horizon: Longest chain the reach oracle is evaluated at
        search: Whether certified bounds are checked by randomized search

    Raises:
        ScenarioError: If a field is inconsistent with the operator family
    """

    name: str
    family: str
    mode: ScalarMode = ScalarMode.EXACT
    seed: int = 0
    weights: WeightAssignment | None = None
    classical: ClassicalWeights | None = None
    window: TruncationParams | None = None
    norm: NormSpec = Lp(2)
    deltas: tuple[Scalar, ...] = ()
    line_range: tuple[int, int] = (0, 0)
    certify_k_max: int = 0
    certify_j_range: tuple[int, int] = (1, 1)
    oracle_horizon: int = 40
    search: bool = False

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise ScenarioError(
                f"Unknown family {self.family!r}, expected one of {sorted(_FAMILIES)}",
                field="family",
            )
        if self.family == "classical":
            if self.classical is None:
                raise ScenarioError("Classical scenarios need a weight sequence", "classical")
            if self.classical.mode is not self.mode:
                raise ScenarioError("Weight sequence mode differs from scenario mode", "mode")
        else:
            if self.weights is None:
                raise ScenarioError(f"{self.family} scenarios need mu1 and mu2", "weights")
            if self.weights.mode is not self.mode:
                raise ScenarioError("Weight mode differs from scenario mode", "mode")
        deltas = tuple(to_scalar(d, self.mode) for d in self.deltas)
        for d in deltas:
            if not d > 0:
                raise ScenarioError(f"Tolerances must be positive, got {d}", "constructions.deltas")
        object.__setattr__(self, "deltas", deltas)
        if self.line_range[0] > self.line_range[1]:
            raise ScenarioError(f"Empty line range {self.line_range}", "constructions.line_range")
        if self.certify_k_max < 0:
            raise ScenarioError("certify k_max must be non-negative", "certify.k_max")
        if self.certify_j_range[0] > self.certify_j_range[1]:
            raise ScenarioError(f"Empty depth range {self.certify_j_range}", "certify.j_range")
        if self.oracle_horizon < 1:
            raise ScenarioError("Oracle horizon must be positive", "oracle.horizon")

    @property
    def op_family(self) -> OpFamily:
        return _FAMILIES[self.family]

    @property
    def base_window(self) -> TruncationParams:
        """Explicit window, or the smallest one holding the certified branches."""
        if self.window is not None:
            return self.window
        k = self.certify_k_max
        if self.family == "classical":
            first = 1 if self.classical.kind == "unilateral" else -self.oracle_horizon
            return TruncationParams(first, self.oracle_horizon)
        if self.family == "grid" and k > 0:
            lo, hi = self.certify_j_range
            return TruncationParams(-k, 1, k, min(lo, -1), max(hi, 1))
        return TruncationParams(-k, 1, k)

    def to_json(self) -> dict[str, Any]:
        """Canonical document; equal scenarios serialize identically."""
        return {
            "name": self.name,
            "family": self.family,
            "mode": self.mode.value,
            "seed": self.seed,
            "weights": self.weights.to_json() if self.weights else None,
            "classical": self.classical.to_json() if self.classical else None,
            "window": self.window.to_json() if self.window else None,
            "norm": norm_spec_to_json(self.norm),
            "deltas": [scalar_to_json(d) for d in self.deltas],
            "line_range": list(self.line_range),
            "certify_k_max": self.certify_k_max,
            "certify_j_range": list(self.certify_j_range),
            "oracle_horizon": self.oracle_horizon,
            "search": self.search,
        }

    def scenario_hash(self) -> str:
        """SHA-256 of the canonical JSON form."""
        canonical = json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    def with_overrides(
        self, seed: int | None = None, mode: ScalarMode | None = None
    ) -> "Scenario":
        """Copy with a different seed or scalar mode (weights are converted)."""
        if (seed is None or seed == self.seed) and (mode is None or mode is self.mode):
            return self
        doc = self.to_json()
        if seed is not None:
            doc["seed"] = seed
        if mode is not None and mode is not self.mode:
            doc["mode"] = mode.value
            for key in ("weights", "classical"):
                if doc[key] is not None:
                    doc[key]["mode"] = mode.value
        return scenario_from_dict(_canonical_to_document(doc))


# ----------------------------------------------------------------------
# Parsing
# ----------------------------------------------------------------------


def scenario_from_dict(doc: Mapping[str, Any]) -> Scenario:
    """Build a scenario from a parsed TOML document.

    Raises:
        ScenarioError: With the dotted path of the offending field
    """
    name = _read(doc, "name", str, default="scenario")
    family = _read(doc, "family", str)
    mode = _read(doc, "mode", ScalarMode, default=ScalarMode.EXACT)

    weights = None
    classical = None
    if family in ("comb", "grid"):
        weights = _read_weights(doc, mode)
    elif family == "classical":
        classical = _read_classical(doc, mode)

    window_doc = doc.get("window")
    window = _convert("window", window_doc, TruncationParams.from_json) if window_doc else None
    norm = _convert("norm", doc.get("norm", {"kind": "lp", "p": 2}), norm_spec_from_json)

    constructions = _table(doc, "constructions")
    certify = _table(doc, "certify")
    oracle = _table(doc, "oracle")
    return Scenario(
        name=name,
        family=family,
        mode=mode,
        seed=_read(doc, "seed", int, default=0),
        weights=weights,
        classical=classical,
        window=window,
        norm=norm,
        deltas=tuple(
            _convert("constructions.deltas", d, lambda x: scalar_from_json(x, mode))
            for d in constructions.get("deltas", [])
        ),
        line_range=_pair(constructions, "constructions.line_range", (0, 0)),
        certify_k_max=_read(certify, "k_max", int, default=0, prefix="certify"),
        certify_j_range=_pair(certify, "certify.j_range", (1, 1)),
        oracle_horizon=_read(oracle, "horizon", int, default=40, prefix="oracle"),
        search=_read(certify, "search", bool, default=False, prefix="certify"),
    )


def _read_weights(doc: Mapping[str, Any], mode: ScalarMode) -> WeightAssignment:
    table = _table(doc, "weights")
    mu1 = _convert("weights.mu1", table.get("mu1"), lambda x: scalar_from_json(x, mode))
    mu2 = _convert("weights.mu2", table.get("mu2"), lambda x: scalar_from_json(x, mode))
    grid_doc = table.get("grid")
    grid = (
        _convert("weights.grid", grid_doc, lambda g: GridWeights.from_json(g, mu2, mode))
        if grid_doc
        else None
    )
    return _convert("weights", None, lambda _: WeightAssignment(mu1, mu2, grid, mode))


def _read_classical(doc: Mapping[str, Any], mode: ScalarMode) -> ClassicalWeights:
    table = _table(doc, "classical")

    def tail(key: str) -> PeriodicTail | None:
        value = table.get(key)
        if value is None:
            return None
        return _convert(f"classical.{key}", value, lambda t: PeriodicTail.from_json(t, mode))

    explicit = _convert(
        "classical.explicit",
        table.get("explicit", {}),
        lambda e: {int(n): scalar_from_json(x, mode) for n, x in e.items()},
    )
    kind = _read(table, "kind", str, prefix="classical")
    return _convert(
        "classical",
        None,
        lambda _: ClassicalWeights(kind, explicit, tail("right"), tail("left"), mode),
    )


def _table(doc: Mapping[str, Any], key: str) -> Mapping[str, Any]:
    value = doc.get(key, {})
    if not isinstance(value, Mapping):
        raise ScenarioError(f"Expected a table, got {type(value).__name__}", field=key)
    return value


def _read(
    doc: Mapping[str, Any],
    key: str,
    convert: Callable[[Any], Any],
    default: Any = ...,
    prefix: str | None = None,
) -> Any:
    path = f"{prefix}.{key}" if prefix else key
    if key not in doc:
        if default is ...:
            raise ScenarioError("Missing required field", field=path)
        return default
    value = doc[key]
    if convert in (int, bool, str) and not isinstance(value, convert):
        raise ScenarioError(f"Expected {convert.__name__}, got {value!r}", field=path)
    return _convert(path, value, convert)


def _convert(path: str, value: Any, convert: Callable[[Any], Any]) -> Any:
    try:
        return convert(value)
    except ScenarioError:
        raise
    except (AttributeError, KeyError, TypeError, ValueError) as e:
        raise ScenarioError(f"Invalid value: {e}", field=path) from e


def _pair(doc: Mapping[str, Any], path: str, default: tuple[int, int]) -> tuple[int, int]:
    value = doc.get(path.rsplit(".", 1)[-1])
    if value is None:
        return default
    if not isinstance(value, list) or len(value) != 2 or not all(isinstance(x, int) for x in value):
        raise ScenarioError(f"Expected a pair of integers, got {value!r}", field=path)
    return value[0], value[1]


def _canonical_to_document(doc: dict[str, Any]) -> dict[str, Any]:
    """Turn :meth:`Scenario.to_json` output back into the TOML document layout."""
    out: dict[str, Any] = {
        "name": doc["name"],
        "family": doc["family"],
        "mode": doc["mode"],
        "seed": doc["seed"],
        "norm": doc["norm"],
        "constructions": {"deltas": doc["deltas"], "line_range": doc["line_range"]},
        "certify": {
            "k_max": doc["certify_k_max"],
            "j_range": doc["certify_j_range"],
            "search": doc["search"],
        },
        "oracle": {"horizon": doc["oracle_horizon"]},
    }
    if doc["window"] is not None:
        out["window"] = doc["window"]
    if doc["weights"] is not None:
        out["weights"] = {
            "mu1": doc["weights"]["mu1"],
            "mu2": doc["weights"]["mu2"],
            "grid": doc["weights"]["grid"],
        }
    if doc["classical"] is not None:
        out["classical"] = {k: v for k, v in doc["classical"].items() if v is not None}
    return out


# ----------------------------------------------------------------------
# Presets
# ----------------------------------------------------------------------


def build_comb_scenario(
    mu1: Any = 2,
    mu2: Any = 4,
    deltas: tuple[Any, ...] = ("1/10", "1/100"),
    mode: ScalarMode = ScalarMode.EXACT,
    certify_k_max: int = 4,
) -> Scenario:
    """Comb shift scenario with seeded search enabled."""
    return Scenario(
        name="comb",
        family="comb",
        mode=mode,
        weights=WeightAssignment(mu1, mu2, mode=mode),
        deltas=tuple(deltas),
        line_range=(-3, 3),
        certify_k_max=certify_k_max,
        search=True,
    )


def build_grid_scenario(
    mu1: Any = 2,
    mu2: Any = 4,
    deltas: tuple[Any, ...] = ("1/10", "1/100"),
    mode: ScalarMode = ScalarMode.EXACT,
    certify_k_max: int = 4,
) -> Scenario:
    """Invertible grid operator scenario with the default weight matrix."""
    return Scenario(
        name="grid",
        family="grid",
        mode=mode,
        weights=WeightAssignment(mu1, mu2, GridWeights.default(to_scalar(mu2, mode)), mode),
        deltas=tuple(deltas),
        line_range=(-3, 3),
        certify_k_max=certify_k_max,
        certify_j_range=(-2, 2),
    )


def build_classical_scenario(
    kind: str = "bilateral",
    weight: Any = 2,
    explicit: Mapping[int, Any] | None = None,
    right: tuple[Any, ...] | None = None,
    name: str | None = None,
    mode: ScalarMode = ScalarMode.EXACT,
    norm: NormSpec | None = None,
) -> Scenario:
    """Classical shift scenario with constant weights, optional overrides and right pattern.

    Args:
        kind: ``unilateral`` or ``bilateral``
        weight: Constant weight on both sides
        explicit: Finite overrides ``{n: lambda_n}``
        right: Periodic pattern replacing the right tail from index 1
        name: Scenario name (derived from the weights when omitted)
        mode: Scalar mode
        norm: Norm of the sequence space (``l^2`` by default)
    """
    base = ClassicalWeights.constant(kind, weight, mode)
    right_tail = base.right if right is None else PeriodicTail(tuple(right), 1)
    weights = ClassicalWeights(kind, dict(explicit or {}), right_tail, base.left, mode)
    return Scenario(
        name=name or f"classical-{kind}-{weight}",
        family="classical",
        mode=mode,
        classical=weights,
        norm=norm or Lp(2),
    )


class ScenarioCatalog:
    """Registry of named scenario presets."""

    def __init__(self, builders: dict[str, Callable[[], Scenario]]):
        """Initialize with preset builders.

        Args:
            builders: Mapping of preset names to zero-argument builders
        """
        self.builders = builders

    def get(self, name: str) -> Scenario:
        """Build the preset called ``name``.

        Raises:
            ScenarioError: If no preset has that name
        """
        if name not in self.builders:
            raise ScenarioError(f"Unknown preset {name!r}", field="preset")
        return self.builders[name]()

    def names(self) -> list[str]:
        return sorted(self.builders)


def build_default_catalog() -> ScenarioCatalog:
    """Presets for the comb, the grid and the classical examples."""
    return ScenarioCatalog(
        {
            "comb": build_comb_scenario,
            "grid": build_grid_scenario,
            "classical-unweighted": lambda: build_classical_scenario(
                "bilateral", 1, name="classical-unweighted"
            ),
            "classical-dilation": lambda: build_classical_scenario(
                "bilateral", 2, name="classical-dilation"
            ),
            "classical-unilateral": lambda: build_classical_scenario(
                "unilateral", 2, name="classical-unilateral"
            ),
            "classical-zero-pattern": lambda: build_classical_scenario(
                "bilateral", 2, explicit={3: 0}, name="classical-zero-pattern"
            ),
            "classical-zero-convergent": lambda: build_classical_scenario(
                "bilateral", "1/2", explicit={3: 0}, name="classical-zero-convergent"
            ),
            "classical-zero-unbounded": lambda: build_classical_scenario(
                "bilateral", 2, right=(0, 2), name="classical-zero-unbounded"
            ),
        }
    )
