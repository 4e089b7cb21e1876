"""Parameter records of the explicit chain constructions."""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

from .scalars import Real, scalar_to_json
from .tree import TruncationParams


class RecipeKind(Enum):
    STEP1 = "Step1"
    STEP2_COMB = "Step2Comb"
    STEP2_GRID = "Step2Grid"
    SHIFTED_MINUS_N = "ShiftedMinusN"
    SHIFTED_PLUS_N = "ShiftedPlusN"
    MEMBERSHIP = "Membership"


class Direction(Enum):
    """Whether a chain runs from a basis vector to 0 or from 0 to it."""

    TO_ZERO = "ToZero"
    FROM_ZERO = "FromZero"


@dataclass(frozen=True)
class ChainRecipe:
    """How a chain was built.

    Attributes:
        kind: Construction used
        delta: Tolerance the chain was built for
        n: Index of the basis vector ``e_n`` the chain starts or ends at
        lengths: Derived lengths (``m1``, ``m2``, ``n_branch`` ...)
        window: Smallest window containing every vector of the chain
        inequalities: Human-readable record of the defining inequalities
        direction: ToZero or FromZero, where meaningful
        parts: Sub-recipes of composite constructions
    """

    kind: RecipeKind
    delta: Real
    n: int = 0
    lengths: Mapping[str, int] = field(default_factory=dict)
    window: TruncationParams | None = None
    inequalities: tuple[str, ...] = ()
    direction: Direction | None = None
    parts: tuple[ChainRecipe, ...] = ()

    def to_json(self) -> dict[str, Any]:
        return {
            "kind": self.kind.value,
            "delta": scalar_to_json(self.delta),
            "n": self.n,
            "lengths": dict(sorted(self.lengths.items())),
            "window": self.window.to_json() if self.window else None,
            "inequalities": list(self.inequalities),
            "direction": self.direction.value if self.direction else None,
            "parts": [p.to_json() for p in self.parts],
        }
