"""Named failure modes.

All of them derive from ``ValueError`` so that callers which only care about
"bad input" can keep catching the built-in exception.
"""

from __future__ import annotations

from typing import Any


class InvalidNormSpecError(ValueError):
    """A norm specification violates its parameter range."""


class ScalarModeError(ValueError):
    """Exact and floating-point scalars were mixed in one operation."""


class InvalidTreeError(ValueError):
    """A directed tree breaks one of the tree axioms."""

    def __init__(self, message: str, violations: list[Any] | None = None):
        super().__init__(message)
        self.violations = violations or []


class TruncationError(ValueError):
    """The truncation window is too small for the requested construction."""


class LeakageOutOfWindowError(ValueError):
    """An operator application would need a vertex outside the window."""

    def __init__(self, vertex: Any, step: int | None = None):
        where = f" at step {step}" if step is not None else ""
        super().__init__(f"Image of {vertex} leaves the truncation window{where}")
        self.vertex = vertex
        self.step = step


class MissingWeightError(ValueError):
    """A non-root vertex has no weight."""


class WeightConditionError(ValueError):
    """A grid weight matrix fails the boundedness or summability conditions."""

    def __init__(self, message: str, k: int | None = None, clause: str | None = None):
        super().__init__(message)
        self.k = k
        self.clause = clause


class EndpointMismatchError(ValueError):
    """Two chains cannot be concatenated because the junction does not match."""


class NonUniqueInfluenceError(ValueError):
    """Several descendants feed a target coordinate, so no unique influence path exists."""

    def __init__(self, vertex: Any):
        super().__init__(f"Coordinate {vertex} is fed by more than one vertex")
        self.vertex = vertex


class NotApplicableError(ValueError):
    """A certificate was requested for a vector it does not apply to."""


class ScenarioError(ValueError):
    """A scenario document is malformed or violates an operator precondition."""

    def __init__(self, message: str, field: str | None = None, line: int | None = None):
        location = ""
        if field:
            location += f" [field: {field}]"
        if line is not None:
            location += f" [line: {line}]"
        super().__init__(f"{message}{location}")
        self.field = field
        self.line = line


class ZeroWeightError(ValueError):
    """A classical weight sequence contains a zero where only non-zero weights are allowed."""

    def __init__(self, index: int):
        super().__init__(f"Weight at index {index} is zero")
        self.index = index
