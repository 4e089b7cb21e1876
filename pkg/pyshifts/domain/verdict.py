"""Influence paths and chain-recurrence verdicts."""

from __future__ import annotations

import math
from collections.abc import Mapping
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Union

from .scalars import Real, Scalar, scalar_to_json
from .seq_vector import SeqVector
from .vertex import VertexId


@dataclass(frozen=True)
class InfluencePath:
    """How unit perturbations reach one coordinate.

    ``coefficients[l]`` is the factor by which a perturbation inserted ``l``
    steps before the end reaches ``target`` at the end; ``vertices[l]`` is where
    that perturbation has to sit.  Past the end of the path the coefficients
    are zero and ``vertices`` is shorter than ``coefficients``.
    """

    target: VertexId
    horizon: int
    coefficients: tuple[Scalar, ...]
    vertices: tuple[VertexId, ...]

    @property
    def path_end(self) -> int | None:
        """Last ``l`` with a feeding vertex, or None if the path outlives the horizon."""
        return len(self.vertices) - 1 if len(self.vertices) <= self.horizon else None

    def to_json(self) -> dict[str, Any]:
        return {
            "target": str(self.target),
            "horizon": self.horizon,
            "coefficients": [scalar_to_json(w) for w in self.coefficients],
            "vertices": [str(v) for v in self.vertices],
        }


class VerdictKind(Enum):
    CHAIN_RECURRENT = "ChainRecurrent"
    NOT_CHAIN_RECURRENT = "NotChainRecurrent"
    INCONCLUSIVE = "Inconclusive"


def _json_value(x: Any) -> Any:
    if isinstance(x, Mapping):
        return {str(k): _json_value(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_json_value(v) for v in x]
    if isinstance(x, SeqVector):
        return x.to_json()
    if hasattr(x, "to_json"):
        return x.to_json()
    if isinstance(x, Enum):
        return x.value
    if isinstance(x, (bool, str, int)) or x is None:
        return x
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    try:
        return scalar_to_json(x)
    except TypeError:
        return str(x)


@dataclass(frozen=True)
class ChainRecurrent:
    """Membership evidence: a descriptor of the chain family or criterion that proves it."""

    evidence: Mapping[str, Any]
    trace: tuple[Mapping[str, Any], ...] = ()

    kind = VerdictKind.CHAIN_RECURRENT

    def to_json(self) -> dict[str, Any]:
        return {
            "verdict": self.kind.value,
            "evidence": _json_value(self.evidence),
            "trace": _json_value(self.trace),
        }


@dataclass(frozen=True)
class NotChainRecurrent:
    """Exclusion proof: no ``delta``-chain with ``delta <= bound`` returns the vector to itself.

    Raises:
        ValueError: If ``bound`` is not strictly positive
    """

    bound: Real
    derivation: Mapping[str, Any]
    trace: tuple[Mapping[str, Any], ...] = ()
    certified: SeqVector | None = None
    alternatives: tuple[Mapping[str, Any], ...] = field(default_factory=tuple)

    kind = VerdictKind.NOT_CHAIN_RECURRENT

    def __post_init__(self):
        if not self.bound > 0:
            raise ValueError(f"Non-recurrence bound must be positive, got {self.bound}")

    def to_json(self) -> dict[str, Any]:
        return {
            "verdict": self.kind.value,
            "bound": _json_value(self.bound),
            "derivation": _json_value(self.derivation),
            "trace": _json_value(self.trace),
            "certified": self.certified.to_json() if self.certified is not None else None,
            "alternatives": _json_value(self.alternatives),
        }


@dataclass(frozen=True)
class Inconclusive:
    """Neither membership nor exclusion could be decided."""

    reason: str
    trace: tuple[Mapping[str, Any], ...] = ()

    kind = VerdictKind.INCONCLUSIVE

    def to_json(self) -> dict[str, Any]:
        return {"verdict": self.kind.value, "reason": self.reason, "trace": _json_value(self.trace)}


Verdict = Union[ChainRecurrent, NotChainRecurrent, Inconclusive]


def json_ready(x: Any) -> Any:
    """Convert nested report values (scalars, vectors, enums) into JSON-ready data."""
    return _json_value(x)


@dataclass(frozen=True)
class ZeroWeightReport:
    """Outcome of the zero-weight analysis of a classical shift.

    Attributes:
        zero_indices: Zero-weight indices found in the inspected range
        unbounded_above: Whether the declared right tail repeats a zero
        n0: Largest zero index when the zero set is bounded above
        subspace: ``"zero"`` for ``{0}``, ``"Y+"`` for ``span{e_n : n >= n0}``
        restriction: Verdict for the shift restricted to that subspace
        trace: Series evaluations behind the decision
    """

    zero_indices: tuple[int, ...]
    unbounded_above: bool
    n0: int | None
    subspace: str | None
    restriction: Verdict
    trace: tuple[Mapping[str, Any], ...] = ()

    def split(self) -> dict[str, Any] | None:
        """The invariant splitting ``Y-`` / ``Y+`` at ``n0``."""
        if self.n0 is None:
            return None
        return {"Y-": f"span{{e_n : n < {self.n0}}}", "Y+": f"span{{e_n : n >= {self.n0}}}"}

    def to_json(self) -> dict[str, Any]:
        return {
            "zero_indices": list(self.zero_indices),
            "unbounded_above": self.unbounded_above,
            "n0": self.n0,
            "subspace": self.subspace,
            "split": self.split(),
            "restriction": self.restriction.to_json(),
            "trace": _json_value(self.trace),
        }
