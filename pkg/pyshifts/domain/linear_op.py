"""Column-sparse linear operators on a truncated vertex set."""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Any

from .scalars import Scalar, ScalarMode, scalar_to_json
from .tree import DirectedTree, TruncationParams
from .vertex import VertexId, vertex_key

Column = tuple[tuple[VertexId, Scalar], ...]


class OpFamily(Enum):
    """Which construction produced an operator."""

    COMB_SHIFT = "CombShift"
    GRID_T = "GridT"
    GRID_T_INVERSE = "GridTInverse"
    CLASSICAL_SHIFT = "ClassicalShift"
    CUSTOM = "Custom"


@dataclass(frozen=True)
class OperatorDescriptor:
    """Serialisable description of an operator: family tag, parameters, window."""

    family: OpFamily
    params: Mapping[str, Any] = field(default_factory=dict)
    window: TruncationParams | None = None

    def to_json(self) -> dict[str, Any]:
        return {
            "family": self.family.value,
            "params": dict(self.params),
            "window": self.window.to_json() if self.window else None,
        }

    @classmethod
    def from_json(cls, doc: Mapping[str, Any]) -> OperatorDescriptor:
        window = doc.get("window")
        return cls(
            family=OpFamily(doc["family"]),
            params=dict(doc.get("params", {})),
            window=TruncationParams.from_json(window) if window else None,
        )


@dataclass(frozen=True, eq=False)
class LinearOp:
    """Linear operator stored as the image of each basis vector.

    Attributes:
        columns: ``columns[u]`` is the image of ``e_u`` as ``(target, coefficient)``
            pairs, restricted to the window
        family: Construction tag
        tree: Window the operator acts on
        mode: Scalar mode of every coefficient
        leaks: Sources whose true image has a part outside the window; applying
            the operator to a vector supported on one of them is refused
        descriptor: Optional serialisable description
    """

    columns: Mapping[VertexId, Column]
    family: OpFamily
    tree: DirectedTree
    mode: ScalarMode = ScalarMode.EXACT
    leaks: frozenset[VertexId] = frozenset()
    descriptor: OperatorDescriptor | None = None

    def column(self, v: VertexId) -> Column:
        return self.columns.get(v, ())

    @cached_property
    def rows(self) -> dict[VertexId, Column]:
        """``rows[v]``: every ``(source, coefficient)`` whose column hits ``v``."""
        out: dict[VertexId, list[tuple[VertexId, Scalar]]] = {}
        for u in sorted(self.columns, key=vertex_key):
            for target, coeff in self.columns[u]:
                out.setdefault(target, []).append((u, coeff))
        return {v: tuple(entries) for v, entries in out.items()}

    def contributors(self, v: VertexId) -> Column:
        return self.rows.get(v, ())

    @property
    def vertices(self) -> frozenset[VertexId]:
        return self.tree.vertices

    def to_json(self) -> dict[str, Any]:
        return {
            "family": self.family.value,
            "mode": self.mode.value,
            "descriptor": self.descriptor.to_json() if self.descriptor else None,
            "columns": {
                str(u): [[str(t), scalar_to_json(c)] for t, c in self.columns[u]]
                for u in sorted(self.columns, key=vertex_key)
            },
            "leaks": [str(v) for v in sorted(self.leaks, key=vertex_key)],
        }

    def __str__(self) -> str:
        return f"{self.family.value} on {self.tree}"
