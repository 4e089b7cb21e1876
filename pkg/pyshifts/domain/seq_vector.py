"""Finitely supported sequences over a vertex set."""

from __future__ import annotations

from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field
from typing import Any

from .errors import ScalarModeError
from .scalars import (
    Scalar,
    ScalarMode,
    coerce_pair_mode,
    scalar_from_json,
    scalar_mode,
    scalar_to_json,
    to_scalar,
)
from .vertex import VertexId, parse_vertex, vertex_key


@dataclass(frozen=True, eq=False)
class SeqVector:
    """Sparse vector ``f = (f(v))_v`` with finite support.

    Entries are stored in canonical form: no stored coefficient is zero.
    Absent vertices read as zero.
    """

    entries: Mapping[VertexId, Scalar] = field(default_factory=dict)
    mode: ScalarMode = ScalarMode.EXACT

    def __post_init__(self):
        clean: dict[VertexId, Scalar] = {}
        for v, x in self.entries.items():
            if scalar_mode(x) not in (None, self.mode):
                raise ScalarModeError(
                    f"Entry at {v} is a {scalar_mode(x).value} scalar in a {self.mode.value} vector"
                )
            value = to_scalar(x, self.mode)
            if value != 0:
                clean[v] = value
        object.__setattr__(self, "entries", clean)

    # ------------------------------------------------------------------
    # Constructors
    # ------------------------------------------------------------------

    @classmethod
    def zero(cls, mode: ScalarMode = ScalarMode.EXACT) -> SeqVector:
        return cls({}, mode)

    @classmethod
    def basis(cls, v: VertexId, mode: ScalarMode = ScalarMode.EXACT, coeff: Any = 1) -> SeqVector:
        """Canonical unit vector ``e_v`` (optionally scaled)."""
        return cls({v: to_scalar(coeff, mode)}, mode)

    # ------------------------------------------------------------------
    # Accessors
    # ------------------------------------------------------------------

    @property
    def support(self) -> frozenset[VertexId]:
        return frozenset(self.entries)

    def coordinate(self, v: VertexId) -> Scalar:
        return self.entries.get(v, to_scalar(0, self.mode))

    def is_zero(self) -> bool:
        return not self.entries

    def items(self) -> list[tuple[VertexId, Scalar]]:
        """Entries in deterministic vertex order."""
        return sorted(self.entries.items(), key=lambda item: vertex_key(item[0]))

    def __iter__(self) -> Iterator[VertexId]:
        return iter(sorted(self.entries, key=vertex_key))

    def __len__(self) -> int:
        return len(self.entries)

    # ------------------------------------------------------------------
    # Linear structure
    # ------------------------------------------------------------------

    def _check_mode(self, other: SeqVector) -> None:
        if self.mode is not other.mode:
            raise ScalarModeError(
                f"Cannot combine {self.mode.value} and {other.mode.value} vectors"
            )

    def scale(self, alpha: Any) -> SeqVector:
        a = self._coerce_coefficient(alpha)
        if a == 0:
            return SeqVector.zero(self.mode)
        return SeqVector({v: a * x for v, x in self.entries.items()}, self.mode)

    def _coerce_coefficient(self, alpha: Any) -> Scalar:
        coerce_pair_mode(scalar_mode(alpha), self.mode)
        return to_scalar(alpha, self.mode)

    def __add__(self, other: SeqVector) -> SeqVector:
        return axpy(1, other, self)

    def __sub__(self, other: SeqVector) -> SeqVector:
        return axpy(-1, other, self)

    def __neg__(self) -> SeqVector:
        return self.scale(-1)

    def restrict(self, vertices: Iterable[VertexId]) -> SeqVector:
        keep = set(vertices)
        return SeqVector({v: x for v, x in self.entries.items() if v in keep}, self.mode)

    def to_mode(self, mode: ScalarMode) -> SeqVector:
        """Convert to another scalar mode (exact -> float is lossy)."""
        if mode is self.mode:
            return self
        return SeqVector({v: to_scalar(x, mode) for v, x in self.entries.items()}, mode)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SeqVector):
            return NotImplemented
        return self.mode is other.mode and self.entries == other.entries

    def __hash__(self) -> int:
        return hash((self.mode, frozenset(self.entries.items())))

    # ------------------------------------------------------------------
    # Serialisation
    # ------------------------------------------------------------------

    def to_json(self) -> dict[str, Any]:
        return {str(v): scalar_to_json(x) for v, x in self.items()}

    @classmethod
    def from_json(cls, doc: Mapping[str, Any], mode: ScalarMode) -> SeqVector:
        return cls({parse_vertex(k): scalar_from_json(x, mode) for k, x in doc.items()}, mode)

    def __str__(self) -> str:
        if not self.entries:
            return "0"
        return " + ".join(f"{x}*e_{v}" for v, x in self.items())

    def __repr__(self) -> str:
        return f"SeqVector(support={len(self.entries)}, mode={self.mode.value})"


def axpy(alpha: Any, f: SeqVector, g: SeqVector) -> SeqVector:
    """Return ``alpha*f + g`` in canonical form.

    Raises:
        ScalarModeError: If ``f`` and ``g`` (or ``alpha``) use different scalar modes.
    """
    f._check_mode(g)
    a = f._coerce_coefficient(alpha)
    if a == 0:
        return g
    out = dict(g.entries)
    for v, x in f.entries.items():
        value = out.get(v, 0) + a * x
        if value == 0:
            out.pop(v, None)
        else:
            out[v] = value
    return SeqVector(out, g.mode)


def linear_combination(terms: Iterable[tuple[Any, SeqVector]], mode: ScalarMode) -> SeqVector:
    """Sum ``alpha_i * f_i`` over ``terms``."""
    total = SeqVector.zero(mode)
    for alpha, f in terms:
        total = axpy(alpha, f, total)
    return total
