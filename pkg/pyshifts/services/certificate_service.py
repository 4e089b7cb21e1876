"""Non-recurrence certificates for branch vectors and the reach oracle behind them."""

import logging
import math
from collections.abc import Callable, Iterable
from fractions import Fraction

from pyshifts.config import VerificationConfig, build_default_config
from pyshifts.domain import (
    Branch,
    ClauseStatus,
    Inconclusive,
    InfluencePath,
    InvalidNormSpecError,
    LeakageOutOfWindowError,
    LinearOp,
    NonUniqueInfluenceError,
    NormSpec,
    NotApplicableError,
    NotChainRecurrent,
    ProductSeminorms,
    ScalarMode,
    SeqVector,
    VertexId,
    WeightAssignment,
)
from pyshifts.domain.scalars import Real, Scalar, modulus, round_down, to_scalar
from pyshifts.domain.verdict import Verdict

from .operator_service import OperatorService

logger = logging.getLogger(__name__)

Target = VertexId | Callable[[int], VertexId]


class CertificateService:
    """Computes how far a vector is from being reachable by small perturbations.

    A delta-chain of length ``m`` from ``f_0`` ends at
    ``T^m f_0 + sum_l T^(m-l) g_l`` with every ``||g_l|| < delta``.  On a
    coordinate ``t`` fed by a single path of ancestors this pins down the
    smallest tolerance that can move the end point's ``t``-coordinate to a
    given value, which is what the exclusion certificates bound from below.
    """

    def __init__(
        self, operator_service: OperatorService, config: VerificationConfig | None = None
    ):
        """Initialize service with dependencies.

        Args:
            operator_service: Service used to apply operators
            config: Oracle horizon and series truncation settings
        """
        self.operator_service = operator_service
        self.config = config or build_default_config()

    # ------------------------------------------------------------------
    # Oracle
    # ------------------------------------------------------------------

    def influence_path(self, op: LinearOp, target: VertexId, horizon: int) -> InfluencePath:
        """Coefficients ``w_0..w_horizon`` through which perturbations reach ``target``.

        ``w_l`` is the product of the ``l`` operator coefficients along the
        unique chain of vertices feeding ``target``; it is zero once that chain
        ends.

        Raises:
            NonUniqueInfluenceError: If a vertex on the path has several feeders
            LeakageOutOfWindowError: If the path runs into a vertex whose
                feeders were cut off by the window
        """
        if horizon < 0:
            raise ValueError(f"Horizon must be non-negative, got {horizon}")
        one = to_scalar(1, op.mode)
        coefficients: list[Scalar] = [one]
        vertices: list[VertexId] = [target]
        current, product = target, one
        for step in range(1, horizon + 1):
            if current in op.tree.cut_above:
                raise LeakageOutOfWindowError(current, step)
            feeders = op.contributors(current)
            if len(feeders) > 1:
                raise NonUniqueInfluenceError(current)
            if not feeders:
                coefficients.extend([to_scalar(0, op.mode)] * (horizon - step + 1))
                break
            current, coeff = feeders[0]
            product = product * coeff
            coefficients.append(product)
            vertices.append(current)
        return InfluencePath(target, horizon, tuple(coefficients), tuple(vertices))

    def min_delta_reach(
        self,
        op: LinearOp,
        source: SeqVector,
        target: VertexId,
        value: Scalar,
        m: int,
        norm_spec: NormSpec | None = None,
    ) -> Real:
        """Least tolerance of an ``m``-chain from ``source`` hitting ``value`` at ``target``.

        Equals ``|value - (T^m source)(target)| / sum_(l<m) |w_l|``; ``inf``
        when no perturbation reaches ``target`` but the orbit misses the value.

        Raises:
            InvalidNormSpecError: For product seminorms, which do not dominate
                coordinates
            NonUniqueInfluenceError: If ``target`` is fed along several paths
        """
        self._require_coordinate_norm(norm_spec)
        if m < 1:
            raise ValueError(f"Chain length must be at least 1, got {m}")
        path = self.influence_path(op, target, m - 1)
        orbit = self.operator_service.apply_power(op, source, m).coordinate(target)
        gap = modulus(to_scalar(value, op.mode) - orbit)
        denominator = sum((modulus(w) for w in path.coefficients), self._zero(op))
        if gap == 0:
            return gap
        if denominator == 0:
            return math.inf
        return round_down(gap / denominator)

    def reach_lower_bound(
        self,
        op: LinearOp,
        source: SeqVector,
        target: VertexId,
        value: Scalar,
        m: int,
        norm_spec: NormSpec | None = None,
    ) -> Real:
        """Lower bound on :meth:`min_delta_reach` valid for any target.

        Replaces the path coefficients by the absolute row sums of ``T^l`` at
        ``target``, so it also covers coordinates fed by several vertices.
        """
        self._require_coordinate_norm(norm_spec)
        if m < 1:
            raise ValueError(f"Chain length must be at least 1, got {m}")
        zero = self._zero(op)
        row: dict[VertexId, Real] = {target: zero + 1}
        denominator = zero
        for step in range(m):
            denominator += sum(row.values(), zero)
            if step == m - 1:
                break
            nxt: dict[VertexId, Real] = {}
            for v, weight in row.items():
                if v in op.tree.cut_above:
                    raise LeakageOutOfWindowError(v, step + 1)
                for u, coeff in op.contributors(v):
                    nxt[u] = nxt.get(u, zero) + weight * modulus(coeff)
            row = nxt
        orbit = self.operator_service.apply_power(op, source, m).coordinate(target)
        gap = modulus(to_scalar(value, op.mode) - orbit)
        if gap == 0:
            return gap
        if denominator == 0:
            return math.inf
        return round_down(gap / denominator)

    def oracle_infimum(
        self,
        op: LinearOp,
        source: SeqVector,
        target: Target,
        value: Scalar,
        horizons: Iterable[int],
        norm_spec: NormSpec | None = None,
    ) -> tuple[Real, int]:
        """Minimum of :meth:`min_delta_reach` over ``horizons`` and the minimising length.

        ``target`` may depend on the length, e.g. ``lambda m: Branch(k, j - m)``.
        """
        best: tuple[Real, int] | None = None
        for m in horizons:
            t = target(m) if callable(target) else target
            value_m = self.min_delta_reach(op, source, t, value, m, norm_spec)
            if best is None or value_m < best[0]:
                best = (value_m, m)
        if best is None:
            raise ValueError("Oracle needs at least one horizon")
        return best

    # ------------------------------------------------------------------
    # Certificates
    # ------------------------------------------------------------------

    def noncr_bound_comb(self, f: SeqVector, weights: WeightAssignment) -> Verdict:
        """Exclusion bound for a vector with a non-zero finger coordinate.

        For each finger ``k`` carrying ``f`` let ``j_k`` be the outermost
        non-zero index; no delta-chain returns ``f`` to itself when
        ``delta <= |f(-k,j_k)| / ((k-j_k+1) |mu2|^(k-j_k))``.  The finger with
        the largest bound is chosen, the others are kept as alternatives.

        Raises:
            NotApplicableError: If ``f`` lives on the line
        """
        rows = self._branch_rows(f, lambda v: 1 <= v.j <= v.k)
        if not rows:
            raise NotApplicableError(f"{f} has no finger coordinate; it lies in the line span")
        b = modulus(weights.mu2)
        candidates = []
        for k in sorted(rows):
            j_k = max(rows[k])
            depth = k - j_k
            value = modulus(f.coordinate(Branch(k, j_k)))
            bound = round_down(value / ((depth + 1) * b**depth))
            candidates.append(
                {
                    "k": k,
                    "j_k": j_k,
                    "bound": bound,
                    "coordinate": value,
                    "inequality": f"delta < {value} / (({depth} + 1) * {b}^{depth})",
                    "cases": {
                        "short_chain": f"m <= {depth}: |f| <= sum_(l<m) {b}^l delta "
                        f"< {depth} * {b}^{depth} * delta",
                        "long_chain": f"m > {depth}: |f| <= sum_(l<={depth}) {b}^l delta "
                        f"< ({depth} + 1) * {b}^{depth} * delta",
                    },
                }
            )
        best = max(candidates, key=lambda c: c["bound"])
        alternatives = tuple(c for c in candidates if c is not best)
        logger.debug(f"Comb certificate for {f}: bound {best['bound']} at k={best['k']}")
        trace = ({"certificate": "comb", "mu2": weights.mu2, **best},)
        return NotChainRecurrent(
            bound=best["bound"],
            derivation={
                "k": best["k"],
                "j_k": best["j_k"],
                "inequality": best["inequality"],
                "oracle": {
                    "source": "f",
                    "target": str(Branch(best["k"], best["j_k"])),
                    "value": "f(target)",
                },
            },
            trace=trace,
            certified=f,
            alternatives=alternatives,
        )

    def noncr_bound_grid(self, f: SeqVector, weights: WeightAssignment) -> Verdict:
        """Exclusion bound for a vector with a non-zero branch coordinate of the grid.

        Case 1 (the products above the core are summable) bounds how close a
        chain from 0 can get to ``f``; Case 2 (the inverse products below it
        are summable) bounds how close a chain from ``f`` can get to 0.  Both
        series are summed explicitly and closed with their geometric tail, and
        the resulting bound is rounded down.

        Raises:
            NotApplicableError: If ``f`` lives on the line
        """
        rows = self._branch_rows(f, lambda v: True)
        if not rows:
            raise NotApplicableError(f"{f} has no branch coordinate; it lies in the line span")
        grid = weights.grid_weights
        terms = self.config.series_explicit_terms
        candidates = []
        trace = []
        for k in sorted(rows):
            above, below = grid.clause_status(k)
            for j0 in sorted(rows[k]):
                value = modulus(f.coordinate(Branch(k, j0)))
                entry: dict = {"k": k, "j0": j0, "coordinate": value}
                if above is ClauseStatus.HOLDS:
                    series = grid.upward_series(k, j0, terms)
                    bound = round_down(value / (1 + series.total))
                    entry["case_1"] = {"series": series, "bound": bound}
                    candidates.append(self._grid_candidate(k, j0, 1, bound, series))
                if below is ClauseStatus.HOLDS:
                    series = grid.downward_series(k, j0, terms)
                    bound = round_down(value / series.total)
                    entry["case_2"] = {"series": series, "bound": bound}
                    candidates.append(self._grid_candidate(k, j0, 2, bound, series))
                entry["clauses"] = {"above": above, "below": below}
                trace.append(entry)

        if not candidates:
            logger.warning(f"No summable clause for the branch rows of {f}")
            return Inconclusive(
                "Neither summability clause can be decided for the branch coordinates",
                tuple(trace),
            )
        best = max(candidates, key=lambda c: c["bound"])
        alternatives = tuple(c for c in candidates if c is not best)
        logger.debug(
            f"Grid certificate for {f}: bound {best['bound']} (case {best['case']}, "
            f"k={best['k']}, j0={best['j0']})"
        )
        return NotChainRecurrent(
            bound=best["bound"],
            derivation=best,
            trace=tuple(trace),
            certified=f,
            alternatives=alternatives,
        )

    # ------------------------------------------------------------------
    # Helpers
    # ------------------------------------------------------------------

    @staticmethod
    def _grid_candidate(k: int, j0: int, case: int, bound: Real, series) -> dict:
        if case == 1:
            inequality = f"delta * (1 + {series.total}) < |f(-{k},{j0})|"
            oracle = {"source": "0", "target": str(Branch(k, j0)), "value": "f(target)"}
        else:
            inequality = f"delta * {series.total} < |f(-{k},{j0})|"
            oracle = {"source": "f", "target": f"(-{k},{j0}-m)", "value": "0"}
        return {
            "k": k,
            "j0": j0,
            "case": case,
            "bound": bound,
            "inequality": inequality,
            "series_total": series.total,
            "oracle": oracle,
        }

    @staticmethod
    def _branch_rows(f: SeqVector, keep) -> dict[int, list[int]]:
        rows: dict[int, list[int]] = {}
        for v in f.support:
            if isinstance(v, Branch) and keep(v):
                rows.setdefault(v.k, []).append(v.j)
        return rows

    @staticmethod
    def _require_coordinate_norm(norm_spec: NormSpec | None) -> None:
        if isinstance(norm_spec, ProductSeminorms):
            raise InvalidNormSpecError(
                "Reach bounds need a norm dominating every coordinate (l^p or sup)"
            )

    @staticmethod
    def _zero(op: LinearOp) -> Real:
        return Fraction(0) if op.mode is ScalarMode.EXACT else 0.0

