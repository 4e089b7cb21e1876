"""Randomized search for delta-chains that return to a given vector."""

import logging

import numpy as np

from pyshifts.config import VerificationConfig, build_default_config
from pyshifts.domain import (
    GaussianRational,
    InvalidNormSpecError,
    LeakageOutOfWindowError,
    LinearOp,
    Lp,
    NormSpec,
    ProductSeminorms,
    SearchResult,
    SeqVector,
    Sup,
    VertexId,
)
from pyshifts.domain.scalars import Real
from pyshifts.domain.vertex import vertex_key

logger = logging.getLogger(__name__)


class ChainSearchService:
    """Samples chains ``f_0 = f, f_l = T f_(l-1) + g_l`` and tries to close them at ``f``.

    The first ``m - 1`` perturbations are drawn at random from the ball of
    radius ``delta / 2``; the last one is forced to ``f - T f_(m-1)``, so a
    trial succeeds exactly when that forced link is shorter than ``delta``.
    Every length up to the configured maximum is tried with the same
    generator, so a fixed seed reproduces the whole search.
    """

    def __init__(self, config: VerificationConfig | None = None):
        """Initialize service with dependencies.

        Args:
            config: Trial count and maximal chain length
        """
        self.config = config or build_default_config()

    def search(
        self,
        op: LinearOp,
        f: SeqVector,
        delta: Real,
        norm_spec: NormSpec | None = None,
        seed: int = 0,
        trials: int | None = None,
        max_length: int | None = None,
    ) -> SearchResult:
        """Search for a ``delta``-chain from ``f`` back to ``f``.

        Perturbations live on the vertices that can feed the support of ``f``
        within the chain length and whose images stay in the window for the
        rest of the chain, so no mass ever leaves the window. The restriction
        is recorded in the result's notes.

        Raises:
            InvalidNormSpecError: For product seminorms
            ValueError: If ``delta`` is not positive or ``f`` leaves the window
            LeakageOutOfWindowError: If the orbit of ``f`` leaves the window
                within ``max_length`` steps
        """
        spec = norm_spec or Lp(2)
        if isinstance(spec, ProductSeminorms):
            raise InvalidNormSpecError("Chain search needs an l^p or sup norm")
        if not delta > 0:
            raise ValueError(f"delta must be positive, got {delta}")
        trials = trials or self.config.search_trials
        max_length = max_length or self.config.search_max_length

        outside = [v for v in f.support if v not in op.vertices]
        if outside:
            raise ValueError(f"Vector is supported outside the window at {outside[0]}")
        survives = self._safe_steps(op, max_length)
        for v in sorted(f.support, key=vertex_key):
            if survives[v] < max_length:
                raise LeakageOutOfWindowError(v, survives[v] + 1)

        feeders = self._feeders(op, f.support, max_length - 1)
        sources = sorted((u for u in feeders if survives[u] >= max_length - 1), key=vertex_key)
        vertices = self._reachable(op, set(f.support) | set(sources), max_length)
        index = {v: i for i, v in enumerate(vertices)}
        matrix = self._matrix(op, index)
        target = np.zeros(len(vertices), dtype=matrix.dtype)
        for v, x in f.items():
            target[index[v]] = self._number(x)
        columns = [index[u] for u in sources]
        notes = [
            f"perturbations drawn on {len(sources)} vertices feeding the support "
            f"within {max_length - 1} steps"
        ]
        if len(sources) < len(feeders):
            notes.append(
                f"{len(feeders) - len(sources)} feeding vertices skipped: "
                "their images leave the window"
            )

        rng = np.random.default_rng(seed)
        radius = float(delta) / 2
        best_ratio, best_length = np.inf, 0
        for length in range(1, max_length + 1):
            states = np.tile(target, (trials, 1))
            for _ in range(length - 1):
                noise = np.zeros_like(states)
                noise[:, columns] = self._sample_ball(rng, trials, len(columns), radius, spec)
                states = states @ matrix.T + noise
            closing = target - states @ matrix.T
            ratios = self._norms(closing, spec) / float(delta)
            i = int(np.argmin(ratios))
            if ratios[i] < best_ratio:
                best_ratio, best_length = float(ratios[i]), length
            if ratios[i] < 1:
                logger.warning(f"Found a return chain of length {length} at delta={delta}")
                break

        found = best_ratio < 1
        logger.debug(
            f"Chain search for {f}: closest ratio {best_ratio:.6g} at length {best_length}"
        )
        return SearchResult(
            found=found,
            delta=float(delta),
            perturbation_radius=radius,
            trials=trials,
            max_length=max_length,
            seed=seed,
            closest_ratio=best_ratio,
            closest_length=best_length,
            notes=tuple(notes),
        )

    @staticmethod
    def _safe_steps(op: LinearOp, limit: int) -> dict[VertexId, int]:
        """How many applications of ``op`` each window vertex survives, capped at ``limit``."""
        steps = dict.fromkeys(op.vertices, 0)
        for s in range(1, limit + 1):
            grown = [
                v
                for v in op.vertices
                if steps[v] == s - 1
                and v not in op.leaks
                and all(steps[t] >= s - 1 for t, _ in op.column(v))
            ]
            if not grown:
                break
            for v in grown:
                steps[v] = s
        return steps

    @staticmethod
    def _feeders(op: LinearOp, support: frozenset[VertexId], depth: int) -> set[VertexId]:
        """Vertices whose image meets ``support`` after at most ``depth`` applications."""
        seen = set(support)
        frontier = set(support)
        for _ in range(depth):
            frontier = {u for v in frontier for u, _ in op.contributors(v)} - seen
            if not frontier:
                break
            seen |= frontier
        return seen

    @staticmethod
    def _reachable(op: LinearOp, start: set[VertexId], depth: int) -> list[VertexId]:
        seen = set(start)
        frontier = set(start)
        for _ in range(depth):
            frontier = {t for v in frontier for t, _ in op.column(v)} - seen
            if not frontier:
                break
            seen |= frontier
        return sorted(seen, key=vertex_key)

    def _matrix(self, op: LinearOp, index: dict) -> np.ndarray:
        entries = [
            (index[t], index[u], self._number(c))
            for u in index
            for t, c in op.column(u)
            if t in index
        ]
        dtype = complex if any(isinstance(c, complex) for _, _, c in entries) else float
        matrix = np.zeros((len(index), len(index)), dtype=dtype)
        for row, col, value in entries:
            matrix[row, col] += value
        return matrix

    @staticmethod
    def _number(x) -> float | complex:
        if isinstance(x, (GaussianRational, complex)):
            return complex(x)
        return float(x)

    @staticmethod
    def _sample_ball(
        rng: np.random.Generator, trials: int, dim: int, radius: float, spec: NormSpec
    ) -> np.ndarray:
        """Points of the closed ball of ``radius``, uniform in direction and magnitude."""
        if isinstance(spec, Sup):
            return rng.uniform(-radius, radius, size=(trials, dim))
        directions = rng.standard_normal((trials, dim))
        lengths = np.linalg.norm(directions, ord=float(spec.p), axis=1, keepdims=True)
        scale = radius * rng.uniform(0.0, 1.0, size=(trials, 1))
        return directions / np.where(lengths == 0, 1.0, lengths) * scale

    @staticmethod
    def _norms(rows: np.ndarray, spec: NormSpec) -> np.ndarray:
        if isinstance(spec, Sup):
            return np.abs(rows).max(axis=1)
        return np.linalg.norm(rows, ord=float(spec.p), axis=1)
