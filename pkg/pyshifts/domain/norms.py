"""Norms, seminorm families and the F-norm on sequence spaces."""

from __future__ import annotations

import math
from collections import deque
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING, Any, Union

import numpy as np

from .errors import InvalidNormSpecError
from .scalars import GaussianRational, Real, ScalarMode, exact_root, modulus, modulus_power
from .seq_vector import SeqVector
from .vertex import VertexId, parse_vertex, vertex_key

if TYPE_CHECKING:
    from .tree import DirectedTree


@dataclass(frozen=True)
class Lp:
    """The ``l^p`` norm, ``1 <= p < inf``."""

    p: float = 2

    def __post_init__(self):
        if not isinstance(self.p, (int, float, Fraction)) or isinstance(self.p, bool):
            raise InvalidNormSpecError(f"p must be a real number, got {self.p!r}")
        if not math.isfinite(self.p) or self.p < 1:
            raise InvalidNormSpecError(f"l^p requires 1 <= p < inf, got p={self.p}")

    def __str__(self) -> str:
        return f"l^{self.p}"


@dataclass(frozen=True)
class Sup:
    """The sup norm of ``c_0``."""

    def __str__(self) -> str:
        return "c0"


@dataclass(frozen=True)
class ProductSeminorms:
    """Seminorms ``||f||_k = max_{v in F_k} |f(v)|`` of the product topology."""

    exhaustion: tuple[frozenset[VertexId], ...]

    def __post_init__(self):
        sets = tuple(frozenset(s) for s in self.exhaustion)
        if not sets:
            raise InvalidNormSpecError("Exhaustion must contain at least one set")
        for k in range(1, len(sets)):
            if not sets[k - 1] <= sets[k]:
                raise InvalidNormSpecError(f"Exhaustion is not increasing at k={k + 1}")
        object.__setattr__(self, "exhaustion", sets)

    def validate_against(self, vertices: Iterable[VertexId]) -> None:
        """Check the union of the exhaustion equals the truncated vertex set."""
        if self.exhaustion[-1] != frozenset(vertices):
            raise InvalidNormSpecError("Exhaustion does not cover the truncated vertex set")

    def __str__(self) -> str:
        return f"K^V[{len(self.exhaustion)} seminorms]"


NormSpec = Union[Lp, Sup, ProductSeminorms]


def norm(f: SeqVector, spec: NormSpec, k: int | None = None) -> Real:
    """Evaluate ``||f||`` for ``spec``.

    For ``ProductSeminorms`` the ``k``-th seminorm (1-based) is returned,
    defaulting to the last one.  Exact mode returns a ``Fraction`` whenever the
    value is rational, otherwise a ``float``.
    """
    if isinstance(spec, ProductSeminorms):
        idx = len(spec.exhaustion) if k is None else k
        if not 1 <= idx <= len(spec.exhaustion):
            raise InvalidNormSpecError(f"Seminorm index {idx} out of range")
        window = spec.exhaustion[idx - 1]
        return _sup(f, [v for v in f.support if v in window])
    if isinstance(spec, Sup):
        return _sup(f, f.support)
    if isinstance(spec, Lp):
        return _lp(f, spec.p)
    raise InvalidNormSpecError(f"Unknown norm specification {spec!r}")


def _zero(mode: ScalarMode) -> Real:
    return Fraction(0) if mode is ScalarMode.EXACT else 0.0


def _sup(f: SeqVector, vertices: Iterable[VertexId]) -> Real:
    values = [modulus(f.coordinate(v)) for v in vertices]
    return max(values) if values else _zero(f.mode)


def _lp(f: SeqVector, p: float) -> Real:
    if f.is_zero():
        return _zero(f.mode)
    if f.mode is ScalarMode.EXACT and float(p).is_integer():
        ip = int(p)
        total = sum((modulus_power(x, ip) for x in f.entries.values()), Fraction(0))
        if isinstance(total, Fraction):
            root = exact_root(total, ip)
            if root is not None:
                return root
        return float(total) ** (1.0 / ip)
    values = np.array([complex(x) if isinstance(x, (complex, GaussianRational)) else float(x)
                       for x in f.entries.values()])
    return float(np.linalg.norm(values, ord=float(p)))


# ----------------------------------------------------------------------
# Seminorm families
# ----------------------------------------------------------------------


SeminormEvaluator = Callable[[SeqVector], Real]


@dataclass(frozen=True)
class SeminormFamily:
    """Increasing seminorm family inducing the topology of a sequence space.

    ``count`` distinct seminorms are evaluable on the window; every later
    seminorm coincides with the last one (Banach spaces have ``count == 1``).
    """

    spec: NormSpec

    @property
    def count(self) -> int:
        if isinstance(self.spec, ProductSeminorms):
            return len(self.spec.exhaustion)
        return 1

    def evaluate(self, f: SeqVector, k: int) -> Real:
        if isinstance(self.spec, ProductSeminorms):
            return norm(f, self.spec, min(k, self.count))
        return norm(f, self.spec)

    def evaluators(self) -> list[SeminormEvaluator]:
        return [lambda f, _k=k: self.evaluate(f, _k) for k in range(1, self.count + 1)]

    def basis_norm(self, v: VertexId, k: int) -> Real:
        """``||e_v||_k``."""
        if isinstance(self.spec, ProductSeminorms):
            return Fraction(1) if v in self.spec.exhaustion[min(k, self.count) - 1] else Fraction(0)
        return Fraction(1)

    def tail_basis_norm(self, k: int) -> Fraction:
        """``||e_v||_k`` for vertices beyond every finite window.

        Finite exhaustion sets never contain the far tail, so product
        seminorms vanish there.
        """
        return Fraction(0) if isinstance(self.spec, ProductSeminorms) else Fraction(1)


def seminorm_family(spec: NormSpec) -> SeminormFamily:
    return SeminormFamily(spec)


@dataclass(frozen=True)
class FnormValue:
    """F-norm value with the explicit bound on the omitted tail."""

    value: Real
    tail_bound: Real

    def __float__(self) -> float:
        return float(self.value)


def fnorm(
    f: SeqVector,
    seminorms: Sequence[SeminormEvaluator],
    remaining_equal: bool = False,
) -> FnormValue:
    """Evaluate ``sum_k 2^-k min(1, ||f||_k)``.

    Args:
        f: Vector to measure.
        seminorms: Ordered evaluators for ``||.||_1 .. ||.||_K``.
        remaining_equal: Whether every seminorm after the K-th equals the K-th.
            If so the tail ``2^-K min(1, ||f||_K)`` is added exactly; otherwise
            it is omitted and ``2^-K`` is reported as the tail bound.

    Raises:
        InvalidNormSpecError: If ``seminorms`` is empty.
    """
    if not seminorms:
        raise InvalidNormSpecError("F-norm needs at least one seminorm")
    exact = f.mode is ScalarMode.EXACT
    one: Real = Fraction(1) if exact else 1.0
    total: Real = _zero(f.mode)
    last: Real = total
    for k, evaluate in enumerate(seminorms, start=1):
        last = evaluate(f)
        total = total + _pow2(-k, exact) * min(one, last)
    cap = _pow2(-len(seminorms), exact)
    if remaining_equal:
        return FnormValue(total + cap * min(one, last), _zero(f.mode))
    return FnormValue(total, cap)


def _pow2(e: int, exact: bool) -> Real:
    return Fraction(2) ** e if exact else 2.0**e


def family_fnorm(f: SeqVector, family: SeminormFamily) -> FnormValue:
    """F-norm induced by a seminorm family on the window."""
    return fnorm(f, family.evaluators(), remaining_equal=True)


# ----------------------------------------------------------------------
# Exhaustions
# ----------------------------------------------------------------------


def breadth_first_exhaustion(
    tree: DirectedTree, start: VertexId | None = None
) -> tuple[frozenset[VertexId], ...]:
    """``F_k`` = vertices within undirected distance ``k-1`` of ``start``."""
    vertices = sorted(tree.vertices, key=vertex_key)
    if not vertices:
        raise InvalidNormSpecError("Cannot exhaust an empty tree")
    origin = start if start is not None else vertices[0]
    dist = {origin: 0}
    queue = deque([origin])
    while queue:
        v = queue.popleft()
        neighbours = list(tree.children_of(v))
        parent = tree.parent_of(v)
        if parent is not None:
            neighbours.append(parent)
        for u in neighbours:
            if u not in dist:
                dist[u] = dist[v] + 1
                queue.append(u)
    # Window components disconnected from the origin join at the end.
    horizon = max(dist.values()) + 1
    for v in vertices:
        dist.setdefault(v, horizon)
    depth = max(dist.values())
    return tuple(
        frozenset(v for v, d in dist.items() if d <= level) for level in range(depth + 1)
    )


def chunked_exhaustion(
    vertices: Iterable[VertexId], step: int = 3
) -> tuple[frozenset[VertexId], ...]:
    """``F_k`` = the first ``k*step`` vertices in vertex order."""
    ordered = sorted(vertices, key=vertex_key)
    if not ordered:
        raise InvalidNormSpecError("Cannot exhaust an empty vertex set")
    if step < 1:
        raise InvalidNormSpecError("Exhaustion step must be positive")
    return tuple(
        frozenset(ordered[: min(len(ordered), end)])
        for end in range(step, len(ordered) + step, step)
    )


def norm_spec_to_json(spec: NormSpec) -> dict[str, Any]:
    if isinstance(spec, Lp):
        return {"kind": "lp", "p": spec.p}
    if isinstance(spec, Sup):
        return {"kind": "sup"}
    return {
        "kind": "product",
        "exhaustion": [sorted((str(v) for v in s)) for s in spec.exhaustion],
    }


def norm_spec_from_json(doc: dict[str, Any]) -> NormSpec:
    kind = doc.get("kind")
    if kind == "lp":
        return Lp(doc.get("p", 2))
    if kind == "sup":
        return Sup()
    if kind == "product":
        return ProductSeminorms(
            tuple(frozenset(parse_vertex(v) for v in s) for s in doc["exhaustion"])
        )
    raise InvalidNormSpecError(f"Unknown norm kind {kind!r}")
