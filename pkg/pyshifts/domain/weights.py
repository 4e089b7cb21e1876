"""Weight assignments for the comb, grid and classical shifts."""

from __future__ import annotations

import math
from collections.abc import Mapping
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any

from .errors import MissingWeightError, WeightConditionError
from .scalars import (
    Real,
    Scalar,
    ScalarMode,
    modulus,
    reciprocal,
    scalar_from_json,
    scalar_to_json,
    to_scalar,
)
from .vertex import Branch, Line, VertexId


class ClauseStatus(Enum):
    """Outcome of a summability check on one side of a grid branch."""

    HOLDS = "holds"
    FAILS = "fails"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class SeriesEvaluation:
    """A positive series evaluated as explicit terms plus a closed-form geometric tail.

    Attributes:
        terms: Explicit terms in summation order
        explicit_sum: Sum of ``terms``
        ratio: Ratio of the geometric tail (None when the tail is undeclared)
        tail: Closed-form value of everything after ``terms`` (``inf`` if divergent)
        converges: True/False when decidable, None otherwise
    """

    terms: tuple[Real, ...]
    explicit_sum: Real
    ratio: Real | None
    tail: Real | None
    converges: bool | None

    @property
    def total(self) -> Real | None:
        if self.converges is None:
            return None
        if not self.converges:
            return math.inf
        return self.explicit_sum + self.tail

    def to_json(self) -> dict[str, Any]:
        total = self.total
        return {
            "terms": [_real_json(t) for t in self.terms],
            "explicit_sum": _real_json(self.explicit_sum),
            "ratio": _real_json(self.ratio) if self.ratio is not None else None,
            "tail": _real_json(self.tail) if self.tail is not None else None,
            "total": _real_json(total) if total is not None else None,
            "converges": self.converges,
        }


def _real_json(x: Real) -> Any:
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    return str(x) if isinstance(x, Fraction) else x


def _geometric_tail(last: Real, ratio: Real) -> tuple[Real, bool]:
    """Sum of ``last*r + last*r^2 + ...``."""
    if last == 0:
        return last, True
    if ratio >= 1:
        return math.inf, False
    return last * ratio / (1 - ratio), True


# ----------------------------------------------------------------------
# Grid weight matrix
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class GridWeights:
    """Weight matrix ``lambda_(-k,j)`` of the invertible grid operator.

    The core is fixed: ``mu2`` for ``1 <= j <= k`` and ``1/mu2`` for
    ``-k <= j <= 0``.  Outside it a finite set of ``overrides`` may be given;
    every other entry above the core equals ``upper`` and every other entry
    below it equals ``lower``.  A tail left as ``None`` is undeclared, so only
    partial sums are available on that side.
    """

    mu2: Scalar
    upper: Scalar | None
    lower: Scalar | None
    overrides: Mapping[tuple[int, int], Scalar] = field(default_factory=dict)
    name: str = "custom"

    def __post_init__(self):
        for (k, j) in self.overrides:
            if k < 1:
                raise ValueError(f"Override row k must be positive, got {k}")
            if -k <= j <= k:
                raise ValueError(f"Override ({-k},{j}) falls inside the fixed core")
        object.__setattr__(self, "overrides", dict(self.overrides))

    @classmethod
    def default(cls, mu2: Scalar) -> GridWeights:
        """``1/mu2`` above the core and ``mu2`` below it."""
        return cls(mu2=mu2, upper=reciprocal(mu2), lower=mu2, name="default")

    def weight(self, k: int, j: int) -> Scalar:
        if 1 <= j <= k:
            return self.mu2
        if -k <= j <= 0:
            return reciprocal(self.mu2)
        if (k, j) in self.overrides:
            return self.overrides[(k, j)]
        tail = self.upper if j > k else self.lower
        if tail is None:
            side = "upper" if j > k else "lower"
            raise MissingWeightError(f"No weight at ({-k},{j}): {side} tail is undeclared")
        return tail

    def _top(self, k: int) -> int:
        """Largest index above which every weight of row k is the upper tail."""
        above = [j for (kk, j) in self.overrides if kk == k and j > k]
        return max([k, *above])

    def _bottom(self, k: int) -> int:
        """Smallest index below which every weight of row k is the lower tail."""
        below = [j for (kk, j) in self.overrides if kk == k and j < -k]
        return min([-k, *below])

    def bounds(self) -> tuple[Real, Real] | None:
        """Analytic ``(inf |lambda|, sup |lambda|)`` over the whole matrix, if decidable."""
        if self.upper is None or self.lower is None:
            return None
        values = [modulus(self.mu2), modulus(reciprocal(self.mu2))]
        values += [modulus(x) for x in self.overrides.values()]
        values += [modulus(self.upper), modulus(self.lower)]
        return min(values), max(values)

    def clause_status(self, k: int) -> tuple[ClauseStatus, ClauseStatus]:
        """Summability of the series above and below the core of row ``k``.

        The first entry concerns ``sum_j |lambda_(-k,1)...lambda_(-k,j)|``, the
        second ``sum_j |lambda_(-k,-(j-1))...lambda_(-k,0)|^-1``.  Since the tails
        are constant the answer only depends on their moduli.
        """
        above = self._tail_status(self.upper, lambda r: r < 1)
        below = self._tail_status(self.lower, lambda r: r > 1)
        return above, below

    @staticmethod
    def _tail_status(tail: Scalar | None, test) -> ClauseStatus:
        if tail is None:
            return ClauseStatus.INCONCLUSIVE
        r = modulus(tail)
        if r == 0:
            return ClauseStatus.FAILS
        return ClauseStatus.HOLDS if test(r) else ClauseStatus.FAILS

    def upward_series(self, k: int, j0: int, explicit_terms: int = 8) -> SeriesEvaluation:
        """``sum_{j>=1} |lambda_(-k,j0+1) ... lambda_(-k,j0+j)|``."""
        n_explicit = max(self._top(k) - j0, 0) + explicit_terms
        terms: list[Real] = []
        product: Real = Fraction(1)
        for j in range(1, n_explicit + 1):
            try:
                product = product * modulus(self.weight(k, j0 + j))
            except MissingWeightError:
                return SeriesEvaluation(tuple(terms), sum(terms, Fraction(0)), None, None, None)
            terms.append(product)
        if self.upper is None:
            return SeriesEvaluation(tuple(terms), sum(terms, Fraction(0)), None, None, None)
        ratio = modulus(self.upper)
        tail, converges = _geometric_tail(product, ratio)
        return SeriesEvaluation(tuple(terms), sum(terms, Fraction(0)), ratio, tail, converges)

    def downward_series(self, k: int, j0: int, explicit_terms: int = 8) -> SeriesEvaluation:
        """``sum_{j>=1} |lambda_(-k,j0-(j-1)) ... lambda_(-k,j0)|^-1``."""
        n_explicit = max(j0 - self._bottom(k) + 1, 0) + explicit_terms
        terms: list[Real] = []
        product: Real = Fraction(1)
        for j in range(1, n_explicit + 1):
            try:
                product = product * modulus(self.weight(k, j0 - (j - 1)))
            except MissingWeightError:
                return SeriesEvaluation(tuple(terms), sum(terms, Fraction(0)), None, None, None)
            if product == 0:
                return SeriesEvaluation(tuple(terms), sum(terms, Fraction(0)), None, None, False)
            terms.append(1 / product)
        if self.lower is None or modulus(self.lower) == 0:
            return SeriesEvaluation(tuple(terms), sum(terms, Fraction(0)), None, None, None)
        ratio = 1 / modulus(self.lower)
        tail, converges = _geometric_tail(terms[-1], ratio)
        return SeriesEvaluation(tuple(terms), sum(terms, Fraction(0)), ratio, tail, converges)

    def to_json(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "upper": scalar_to_json(self.upper) if self.upper is not None else None,
            "lower": scalar_to_json(self.lower) if self.lower is not None else None,
            "overrides": [
                {"k": k, "j": j, "value": scalar_to_json(x)}
                for (k, j), x in sorted(self.overrides.items())
            ],
        }

    @classmethod
    def from_json(cls, doc: Mapping[str, Any], mu2: Scalar, mode: ScalarMode) -> GridWeights:
        if doc.get("name") == "default":
            return cls.default(mu2)

        def read(key: str) -> Scalar | None:
            value = doc.get(key)
            return scalar_from_json(value, mode) if value is not None else None

        overrides = {
            (int(o["k"]), int(o["j"])): scalar_from_json(o["value"], mode)
            for o in doc.get("overrides", [])
        }
        return cls(mu2, read("upper"), read("lower"), overrides, doc.get("name", "custom"))


# ----------------------------------------------------------------------
# Comb / grid weight assignment
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class WeightAssignment:
    """Line weight ``mu1``, branch weight ``mu2`` and the optional grid matrix.

    Raises:
        WeightConditionError: Unless ``1 < |mu1| < |mu2|``
    """

    mu1: Scalar
    mu2: Scalar
    grid: GridWeights | None = None
    mode: ScalarMode = ScalarMode.EXACT

    def __post_init__(self):
        mu1 = to_scalar(self.mu1, self.mode)
        mu2 = to_scalar(self.mu2, self.mode)
        object.__setattr__(self, "mu1", mu1)
        object.__setattr__(self, "mu2", mu2)
        if not 1 < modulus(mu1) < modulus(mu2):
            raise WeightConditionError(
                f"Weights must satisfy 1 < |mu1| < |mu2|, got |mu1|={modulus(mu1)}, "
                f"|mu2|={modulus(mu2)}",
                clause="ordering",
            )
        if self.grid is not None and self.grid.mu2 != mu2:
            raise WeightConditionError("Grid matrix core must use the same mu2", clause="core")

    @property
    def grid_weights(self) -> GridWeights:
        return self.grid if self.grid is not None else GridWeights.default(self.mu2)

    def comb_weight(self, v: VertexId) -> Scalar:
        """Weight of ``v`` in the comb tree: ``mu1`` on the line, ``mu2`` on fingers."""
        if isinstance(v, Line):
            return self.mu1
        if 1 <= v.j <= v.k:
            return self.mu2
        raise MissingWeightError(f"{v} is not a comb vertex")

    def grid_weight(self, v: Branch) -> Scalar:
        return self.grid_weights.weight(v.k, v.j)

    def to_json(self) -> dict[str, Any]:
        return {
            "mu1": scalar_to_json(self.mu1),
            "mu2": scalar_to_json(self.mu2),
            "grid": self.grid.to_json() if self.grid is not None else None,
            "mode": self.mode.value,
        }

    @classmethod
    def from_json(cls, doc: Mapping[str, Any]) -> WeightAssignment:
        mode = ScalarMode(doc.get("mode", "exact"))
        mu1 = scalar_from_json(doc["mu1"], mode)
        mu2 = scalar_from_json(doc["mu2"], mode)
        grid_doc = doc.get("grid")
        grid = GridWeights.from_json(grid_doc, mu2, mode) if grid_doc else None
        return cls(mu1, mu2, grid, mode)


# ----------------------------------------------------------------------
# Classical shifts
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class PeriodicTail:
    """Eventually periodic weights on one side of the line.

    A right tail covers ``n >= start`` with ``lambda_n = values[(n - start) % p]``;
    a left tail covers ``n <= start`` with ``lambda_n = values[(start - n) % p]``.
    A constant tail is a period of length one.
    """

    values: tuple[Scalar, ...]
    start: int

    def __post_init__(self):
        if not self.values:
            raise ValueError("A periodic tail needs at least one value")
        object.__setattr__(self, "values", tuple(self.values))

    @property
    def period(self) -> int:
        return len(self.values)

    def period_product(self) -> Real:
        """``prod |values|`` (the growth factor of weight products over one period)."""
        out: Real = Fraction(1)
        for x in self.values:
            out = out * modulus(x)
        return out

    def has_zero(self) -> bool:
        return any(x == 0 for x in self.values)

    def to_json(self) -> dict[str, Any]:
        return {"values": [scalar_to_json(x) for x in self.values], "start": self.start}

    @classmethod
    def from_json(cls, doc: Mapping[str, Any], mode: ScalarMode) -> PeriodicTail:
        return cls(tuple(scalar_from_json(x, mode) for x in doc["values"]), int(doc["start"]))


@dataclass(frozen=True)
class ClassicalWeights:
    """Weights ``(lambda_n)`` of a unilateral (V = N) or bilateral (V = Z) backward shift.

    ``explicit`` entries take precedence; otherwise the right tail answers for
    ``n >= right.start`` and the left tail for ``n <= left.start``.
    """

    kind: str
    explicit: Mapping[int, Scalar] = field(default_factory=dict)
    right: PeriodicTail | None = None
    left: PeriodicTail | None = None
    mode: ScalarMode = ScalarMode.EXACT

    def __post_init__(self):
        if self.kind not in ("unilateral", "bilateral"):
            raise ValueError(
                f"Classical shift kind must be unilateral or bilateral, got {self.kind}"
            )
        if self.kind == "unilateral" and self.left is not None:
            raise ValueError("A unilateral shift has no left tail")
        object.__setattr__(
            self, "explicit", {int(n): to_scalar(x, self.mode) for n, x in self.explicit.items()}
        )
        for tail_name in ("right", "left"):
            tail = getattr(self, tail_name)
            if tail is not None:
                values = tuple(to_scalar(x, self.mode) for x in tail.values)
                coerced = PeriodicTail(values, tail.start)
                object.__setattr__(self, tail_name, coerced)

    @classmethod
    def constant(
        cls, kind: str, value: Any, mode: ScalarMode = ScalarMode.EXACT
    ) -> ClassicalWeights:
        """``lambda_n = value`` for every index."""
        first = 1 if kind == "unilateral" else 0
        right = PeriodicTail((to_scalar(value, mode),), first)
        left = PeriodicTail((to_scalar(value, mode),), first - 1) if kind == "bilateral" else None
        return cls(kind, {}, right, left, mode)

    @property
    def first_index(self) -> int | None:
        """Smallest vertex of V (``1`` for N, None for Z)."""
        return 1 if self.kind == "unilateral" else None

    def weight(self, n: int) -> Scalar:
        if n in self.explicit:
            return self.explicit[n]
        if self.right is not None and n >= self.right.start:
            return self.right.values[(n - self.right.start) % self.right.period]
        if self.left is not None and n <= self.left.start:
            return self.left.values[(self.left.start - n) % self.left.period]
        raise MissingWeightError(f"No weight declared for index {n}")

    def zero_indices(self, lo: int, hi: int) -> list[int]:
        """Indices ``lo <= n <= hi`` with ``lambda_n = 0`` (undeclared indices skipped)."""
        out = []
        for n in range(lo, hi + 1):
            try:
                if self.weight(n) == 0:
                    out.append(n)
            except MissingWeightError:
                continue
        return out

    def has_zeros(self, lo: int, hi: int) -> bool:
        tails = [t for t in (self.right, self.left) if t is not None]
        return bool(self.zero_indices(lo, hi)) or any(t.has_zero() for t in tails)

    def modulus_infimum(self) -> Real | None:
        """``inf |lambda_n|`` over all of V, or None if a required tail is undeclared."""
        if self.right is None or (self.kind == "bilateral" and self.left is None):
            return None
        values = [modulus(x) for x in self.explicit.values()]
        for tail in (self.right, self.left):
            if tail is not None:
                values.extend(modulus(x) for x in tail.values)
        return min(values)

    def to_json(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "explicit": {str(n): scalar_to_json(x) for n, x in sorted(self.explicit.items())},
            "right": self.right.to_json() if self.right else None,
            "left": self.left.to_json() if self.left else None,
            "mode": self.mode.value,
        }

    @classmethod
    def from_json(cls, doc: Mapping[str, Any]) -> ClassicalWeights:
        mode = ScalarMode(doc.get("mode", "exact"))
        right = doc.get("right")
        left = doc.get("left")
        explicit = doc.get("explicit", {})
        return cls(
            kind=doc["kind"],
            explicit={int(n): scalar_from_json(x, mode) for n, x in explicit.items()},
            right=PeriodicTail.from_json(right, mode) if right else None,
            left=PeriodicTail.from_json(left, mode) if left else None,
            mode=mode,
        )
