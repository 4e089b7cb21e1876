"""Vertex identifiers for the line and branch vertex sets."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union


@dataclass(frozen=True)
class Line:
    """Integer vertex ``n`` on the line."""

    n: int

    @property
    def sort_key(self) -> tuple[int, int, int]:
        return (0, self.n, 0)

    def __str__(self) -> str:
        return str(self.n)


@dataclass(frozen=True)
class Branch:
    """Branch vertex ``(-k, j)``: depth ``j`` on the branch attached at line vertex ``-k``."""

    k: int
    j: int

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"Branch index k must be positive, got {self.k}")

    @property
    def sort_key(self) -> tuple[int, int, int]:
        return (1, self.k, self.j)

    @property
    def anchor(self) -> Line:
        """Line vertex the branch is attached to."""
        return Line(-self.k)

    def __str__(self) -> str:
        return f"(-{self.k},{self.j})"


VertexId = Union[Line, Branch]

_BRANCH_RE = re.compile(r"^\(\s*-\s*(\d+)\s*,\s*(-?\d+)\s*\)$")


def vertex_key(v: VertexId) -> tuple[int, int, int]:
    """Total order on vertices: line vertices first, then branches by (k, j)."""
    return v.sort_key


def parse_vertex(text: str | int) -> VertexId:
    """Parse ``"5"``, ``"-3"`` or ``"(-3,2)"`` into a vertex id."""
    if isinstance(text, int):
        return Line(text)
    s = str(text).strip()
    match = _BRANCH_RE.match(s)
    if match:
        return Branch(int(match.group(1)), int(match.group(2)))
    try:
        return Line(int(s))
    except ValueError as e:
        raise ValueError(f"Cannot parse vertex id {text!r}") from e
