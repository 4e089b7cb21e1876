"""Directed tree entity and truncation window parameters."""

from __future__ import annotations

from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from typing import Any

from .vertex import Branch, Line, VertexId, parse_vertex, vertex_key


@dataclass(frozen=True)
class TruncationParams:
    """Finite window onto an infinite vertex set.

    Attributes:
        n_min: Smallest line vertex in the window
        n_max: Largest line vertex in the window
        k_max: Number of branches (branch ``k`` is attached at line vertex ``-k``)
        j_min: Smallest branch depth (grid trees only)
        j_max: Largest branch depth (grid trees only)
    """

    n_min: int
    n_max: int
    k_max: int = 0
    j_min: int = 0
    j_max: int = 0

    def __post_init__(self):
        if self.n_min > self.n_max:
            raise ValueError(f"Empty line range [{self.n_min}, {self.n_max}]")
        if self.k_max < 0:
            raise ValueError(f"k_max must be non-negative, got {self.k_max}")
        if self.k_max > 0 and (self.n_min > -self.k_max or self.n_max < 1):
            raise ValueError(
                f"Window [{self.n_min}, {self.n_max}] must contain every attachment point "
                f"-1..-{self.k_max} and reach n >= 1"
            )
        if self.j_min > self.j_max:
            raise ValueError(f"Empty branch depth range [{self.j_min}, {self.j_max}]")

    def to_json(self) -> dict[str, int]:
        return {
            "n_min": self.n_min,
            "n_max": self.n_max,
            "k_max": self.k_max,
            "j_min": self.j_min,
            "j_max": self.j_max,
        }

    @classmethod
    def from_json(cls, doc: Mapping[str, Any]) -> TruncationParams:
        return cls(
            n_min=int(doc["n_min"]),
            n_max=int(doc["n_max"]),
            k_max=int(doc.get("k_max", 0)),
            j_min=int(doc.get("j_min", 0)),
            j_max=int(doc.get("j_max", 0)),
        )

    def covers(self, other: TruncationParams) -> bool:
        """Whether this window contains ``other`` in every dimension."""
        return (
            self.n_min <= other.n_min
            and self.n_max >= other.n_max
            and self.k_max >= other.k_max
            and self.j_min <= other.j_min
            and self.j_max >= other.j_max
        )


@dataclass(frozen=True)
class DirectedTree:
    """Finite window of a directed tree.

    ``cut_below`` holds vertices whose parent lies outside the window and
    ``cut_above`` vertices with at least one child outside it.  Neither kind is
    a root: the truncation, not the tree, removed their neighbours.
    """

    vertices: frozenset[VertexId]
    parent: Mapping[VertexId, VertexId | None]
    children: Mapping[VertexId, tuple[VertexId, ...]]
    cut_below: frozenset[VertexId] = frozenset()
    cut_above: frozenset[VertexId] = frozenset()
    kind: str = "custom"
    params: TruncationParams | None = None

    @classmethod
    def from_parents(
        cls,
        parents: Mapping[VertexId, VertexId | None],
        cut_below: Iterable[VertexId] = (),
        cut_above: Iterable[VertexId] = (),
        kind: str = "custom",
        params: TruncationParams | None = None,
        child_order: Mapping[VertexId, Iterable[VertexId]] | None = None,
    ) -> DirectedTree:
        """Build a tree from a parent map; children are derived from it."""
        children: dict[VertexId, list[VertexId]] = {v: [] for v in parents}
        for v, p in parents.items():
            if p is not None:
                children.setdefault(p, []).append(v)
        ordered: dict[VertexId, tuple[VertexId, ...]] = {}
        for v, chi in children.items():
            if child_order and v in child_order:
                ordered[v] = tuple(child_order[v])
            else:
                ordered[v] = tuple(sorted(chi, key=_child_key))
        return cls(
            vertices=frozenset(parents),
            parent=dict(parents),
            children=ordered,
            cut_below=frozenset(cut_below),
            cut_above=frozenset(cut_above),
            kind=kind,
            params=params,
        )

    # ------------------------------------------------------------------
    # Navigation
    # ------------------------------------------------------------------

    def parent_of(self, v: VertexId) -> VertexId | None:
        return self.parent.get(v)

    def children_of(self, v: VertexId) -> tuple[VertexId, ...]:
        return self.children.get(v, ())

    def __contains__(self, v: object) -> bool:
        return v in self.vertices

    def __len__(self) -> int:
        return len(self.vertices)

    @property
    def window_cut(self) -> frozenset[VertexId]:
        return self.cut_below | self.cut_above

    @property
    def parentless(self) -> list[VertexId]:
        return sorted((v for v in self.vertices if self.parent.get(v) is None), key=vertex_key)

    @property
    def root(self) -> VertexId | None:
        """The unique parentless vertex that is not a window cut, if any."""
        roots = [v for v in self.parentless if v not in self.cut_below]
        return roots[0] if len(roots) == 1 else None

    @property
    def edges(self) -> list[tuple[VertexId, VertexId]]:
        return [
            (p, v)
            for v in sorted(self.vertices, key=vertex_key)
            if (p := self.parent.get(v)) is not None
        ]

    def ancestors(self, v: VertexId, n: int) -> list[VertexId]:
        """Up to ``n`` successive parents of ``v``."""
        out: list[VertexId] = []
        current = v
        for _ in range(n):
            p = self.parent.get(current)
            if p is None:
                break
            out.append(p)
            current = p
        return out

    def branching_vertices(self) -> list[VertexId]:
        """Vertices with more than one child."""
        return sorted((v for v in self.vertices if len(self.children_of(v)) > 1), key=vertex_key)

    def leaves(self) -> list[VertexId]:
        """Vertices without children that are not cut by the window."""
        return sorted(
            (v for v in self.vertices if not self.children_of(v) and v not in self.cut_above),
            key=vertex_key,
        )

    def sorted_vertices(self) -> list[VertexId]:
        return sorted(self.vertices, key=vertex_key)

    # ------------------------------------------------------------------
    # Serialisation
    # ------------------------------------------------------------------

    def to_json(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "vertices": [str(v) for v in self.sorted_vertices()],
            "edges": [[str(p), str(c)] for p, c in self.edges],
            "flags": {
                "root": str(self.root) if self.root is not None else None,
                "cut_below": [str(v) for v in sorted(self.cut_below, key=vertex_key)],
                "cut_above": [str(v) for v in sorted(self.cut_above, key=vertex_key)],
            },
            "params": self.params.to_json() if self.params else None,
        }

    def __str__(self) -> str:
        return f"{self.kind} tree ({len(self.vertices)} vertices, {len(self.edges)} edges)"


def _child_key(v: VertexId) -> tuple[int, int, int]:
    # Line children come before branch children.
    return vertex_key(v)


def tree_from_json(doc: Mapping[str, Any]) -> DirectedTree:
    """Rebuild a tree from :meth:`DirectedTree.to_json` output."""
    parents: dict[VertexId, VertexId | None] = {parse_vertex(v): None for v in doc["vertices"]}
    for p, c in doc["edges"]:
        parents[parse_vertex(c)] = parse_vertex(p)
    flags = doc.get("flags", {})
    params = doc.get("params")
    return DirectedTree.from_parents(
        parents,
        cut_below=[parse_vertex(v) for v in flags.get("cut_below", [])],
        cut_above=[parse_vertex(v) for v in flags.get("cut_above", [])],
        kind=doc.get("kind", "custom"),
        params=TruncationParams.from_json(params) if params else None,
    )


def line_vertices(tree: DirectedTree) -> list[Line]:
    return sorted((v for v in tree.vertices if isinstance(v, Line)), key=vertex_key)


def branch_vertices(tree: DirectedTree) -> list[Branch]:
    return sorted((v for v in tree.vertices if isinstance(v, Branch)), key=vertex_key)
