"""Series criterion for classical weighted shifts, including weights that vanish."""

import logging
import math
from fractions import Fraction

from pyshifts.config import VerificationConfig, build_default_config
from pyshifts.domain import (
    ChainRecurrent,
    ClassicalWeights,
    Inconclusive,
    Line,
    Lp,
    MissingWeightError,
    NormSpec,
    NotApplicableError,
    NotChainRecurrent,
    ScalarMode,
    SeminormFamily,
    SeqVector,
    SeriesEvaluation,
    TruncationParams,
    Verdict,
    ZeroWeightError,
    ZeroWeightReport,
    seminorm_family,
)
from pyshifts.domain.scalars import Real, modulus, round_down

from .certificate_service import CertificateService
from .operator_service import OperatorService

logger = logging.getLogger(__name__)


class CriterionService:
    """Decides chain recurrence of classical backward shifts from their weights.

    With ``S+`` the series ``sum_n |lambda_(n0+1)...lambda_(n0+n)| / ||e_(n0+n)||``
    and ``S-`` the series ``sum_n 1 / (|lambda_(n0-(n-1))...lambda_(n0)| ||e_(n0-n)||)``
    (``c/0 = inf``), the shift is chain recurrent exactly when ``S+`` diverges
    and, on the integers, ``S-`` diverges as well.  Divergence is only decided
    for declared eventually periodic tails; the ratio over one period settles
    it.
    """

    def __init__(
        self,
        operator_service: OperatorService,
        certificate_service: CertificateService,
        config: VerificationConfig | None = None,
    ):
        """Initialize service with dependencies.

        Args:
            operator_service: Service used to build line windows for the oracle
            certificate_service: Reach oracle used to cross-check bounds
            config: n0 window, explicit series terms and oracle horizon
        """
        self.operator_service = operator_service
        self.certificate_service = certificate_service
        self.config = config or build_default_config()

    # ------------------------------------------------------------------
    # Series
    # ------------------------------------------------------------------

    def criterion_partial_sums(
        self,
        weights: ClassicalWeights,
        norms: SeminormFamily | NormSpec,
        n0: int,
        k: int,
        m: int,
    ) -> tuple[Real, Real]:
        """``(S+(m), S-(m))`` at base index ``n0`` for the ``k``-th seminorm.

        On the natural numbers ``S-`` only runs over indices that exist.

        Raises:
            ZeroWeightError: If a weight in the sums vanishes
            MissingWeightError: If a weight in the sums is undeclared
        """
        if m < 0:
            raise ValueError(f"Horizon must be non-negative, got {m}")
        family = self._family(norms)
        zero = self._zero(weights)
        plus = sum(self._plus_terms(weights, family, n0, k, m), zero)
        minus = sum(self._minus_terms(weights, family, n0, k, m), zero)
        return plus, minus

    def series_plus(
        self, weights: ClassicalWeights, family: SeminormFamily, n0: int, k: int
    ) -> SeriesEvaluation:
        """``S+`` at ``n0`` as explicit terms plus the closed periodic tail."""
        tail = weights.right
        explicit = self.config.series_explicit_terms
        if tail is None:
            terms = self._available(self._plus_terms, weights, family, n0, k, explicit)
            return self._partial(weights, terms)
        top = max([tail.start, *(n for n in weights.explicit if n > n0)])
        count = max(top - n0, 0) + tail.period * max(1, -(-explicit // tail.period))
        terms = self._plus_terms(weights, family, n0, k, count)
        if family.tail_basis_norm(k) == 0:
            return self._divergent(weights, terms)
        return self._close(weights, terms, tail.period, tail.period_product())

    def series_minus(
        self, weights: ClassicalWeights, family: SeminormFamily, n0: int, k: int
    ) -> SeriesEvaluation:
        """``S-`` at ``n0``; only meaningful for bilateral shifts."""
        tail = weights.left
        explicit = self.config.series_explicit_terms
        if tail is None:
            terms = self._available(self._minus_terms, weights, family, n0, k, explicit)
            return self._partial(weights, terms)
        bottom = min([tail.start, *(n for n in weights.explicit if n <= n0)])
        count = max(n0 - bottom + 1, 0) + tail.period * max(1, -(-explicit // tail.period))
        terms = self._minus_terms(weights, family, n0, k, count)
        if family.tail_basis_norm(k) == 0:
            return self._divergent(weights, terms)
        return self._close(weights, terms, tail.period, 1 / tail.period_product())

    # ------------------------------------------------------------------
    # Classification
    # ------------------------------------------------------------------

    def classify_classical(
        self, weights: ClassicalWeights, norm_spec: NormSpec | None = None
    ) -> Verdict:
        """Classify the shift with every base index of the configured n0 window.

        Raises:
            ZeroWeightError: If the weights vanish somewhere; use
                :meth:`zero_weight_analysis` for those shifts
        """
        spec = norm_spec or Lp(2)
        family = seminorm_family(spec)
        self._reject_zeros(weights)
        k = family.count

        lo, hi = self._n0_range(weights)
        rows = [self._criterion_row(weights, family, n0, k) for n0 in range(lo, hi + 1)]
        statuses = {row["chain_recurrent"] for row in rows}
        trace = tuple(rows)
        logger.debug(f"Criterion sweep n0 in [{lo}, {hi}] for {weights.kind} shift: {statuses}")

        if None in statuses:
            logger.warning("Undeclared weight tail; divergence of the series is undecidable")
            return Inconclusive("Weight tail undeclared; only partial sums are available", trace)
        if len(statuses) > 1:
            logger.error(f"Criterion verdict depends on n0 over [{lo}, {hi}]")
            return Inconclusive("Criterion verdict is not invariant over the n0 window", trace)
        if statuses == {True}:
            required = ["S+", "S-"] if weights.kind == "bilateral" else ["S+"]
            return ChainRecurrent(
                evidence={
                    "criterion": "series divergence",
                    "required": required,
                    "n0_window": [lo, hi],
                    "norm": str(spec),
                },
                trace=trace,
            )

        base = 0 if lo <= 0 <= hi else lo
        if weights.first_index is not None:
            base = max(base, weights.first_index)
        return self._exclusion(weights, next(r for r in rows if r["n0"] == base), spec, trace)

    def zero_weight_analysis(
        self, weights: ClassicalWeights, norm_spec: NormSpec | None = None
    ) -> ZeroWeightReport:
        """Chain recurrent vectors of a shift whose weights vanish somewhere.

        If the zeros are unbounded above only 0 is chain recurrent.  Otherwise,
        with ``n0`` the largest zero, the chain recurrent vectors form
        ``span{e_n : n >= n0}`` when ``S+`` diverges at ``n0`` and ``{0}``
        otherwise.  The shift restricted to that subspace is chain recurrent in
        every case.

        Raises:
            NotApplicableError: If no weight vanishes
        """
        family = seminorm_family(norm_spec or Lp(2))
        lo, hi = self._scan_range(weights)
        zeros = tuple(weights.zero_indices(lo, hi))
        if not zeros:
            raise NotApplicableError("No weight vanishes; use classify_classical")

        right = weights.right
        if right is not None and right.has_zero():
            logger.info("Zero weights repeat in the right tail: only 0 is chain recurrent")
            restriction = ChainRecurrent({"subspace": "{0}", "operator": "zero"})
            return ZeroWeightReport(zeros, True, None, "zero", restriction)
        if right is None:
            logger.warning("Right weight tail undeclared; zero set may be unbounded above")
            reason = "Right weight tail undeclared; the zero set may be unbounded above"
            return ZeroWeightReport(zeros, False, None, None, Inconclusive(reason))

        n0 = max(zeros)
        plus = self.series_plus(weights, family, n0, family.count)
        trace = ({"n0": n0, "S+": plus},)
        if plus.converges is None:
            return ZeroWeightReport(
                zeros, False, n0, None, Inconclusive("S+ undecidable at n0", trace), trace
            )
        if plus.converges:
            logger.info(f"S+ converges at n0={n0}: only 0 is chain recurrent")
            restriction = ChainRecurrent({"subspace": "{0}", "operator": "zero"}, trace)
            return ZeroWeightReport(zeros, False, n0, "zero", restriction, trace)
        logger.info(f"S+ diverges at n0={n0}: chain recurrent vectors are span{{e_n : n >= {n0}}}")
        restriction = ChainRecurrent(
            {"subspace": f"span{{e_n : n >= {n0}}}", "operator": "unilateral shift from n0"},
            trace,
        )
        return ZeroWeightReport(zeros, False, n0, "Y+", restriction, trace)

    def dilation_constant(self, weights: ClassicalWeights) -> Real:
        """``inf |lambda_n|``; a bilateral shift satisfies ``||Bx|| >= c ||x||``.

        Raises:
            NotApplicableError: For unilateral shifts (never bounded below) or
                undeclared tails
        """
        if weights.kind != "bilateral":
            raise NotApplicableError("A unilateral shift has a kernel and is no dilation")
        c = weights.modulus_infimum()
        if c is None:
            raise NotApplicableError("Dilation constant needs both weight tails declared")
        return c

    # ------------------------------------------------------------------
    # Helpers
    # ------------------------------------------------------------------

    def _criterion_row(
        self, weights: ClassicalWeights, family: SeminormFamily, n0: int, k: int
    ) -> dict:
        plus = self.series_plus(weights, family, n0, k)
        required = [plus.converges]
        row = {"n0": n0, "S+": plus, "S-": None}
        if weights.kind == "bilateral":
            minus = self.series_minus(weights, family, n0, k)
            row["S-"] = minus
            required.append(minus.converges)
        if True in required:
            row["chain_recurrent"] = False
        elif None in required:
            row["chain_recurrent"] = None
        else:
            row["chain_recurrent"] = True
        return row

    def _exclusion(
        self, weights: ClassicalWeights, row: dict, spec: NormSpec, trace: tuple
    ) -> NotChainRecurrent:
        n0 = row["n0"]
        candidates = []
        plus: SeriesEvaluation = row["S+"]
        if plus.converges:
            candidates.append(
                {
                    "case": "S+ converges",
                    "n0": n0,
                    "bound": round_down(1 / (1 + plus.total)),
                    "inequality": f"delta * (1 + {plus.total}) < |f({n0})|",
                    "oracle": self._oracle_check(weights, n0, "plus"),
                }
            )
        minus: SeriesEvaluation | None = row["S-"]
        if minus is not None and minus.converges:
            candidates.append(
                {
                    "case": "S- converges",
                    "n0": n0,
                    "bound": round_down(1 / minus.total),
                    "inequality": f"delta * {minus.total} < |f({n0})|",
                    "oracle": self._oracle_check(weights, n0, "minus"),
                }
            )
        best = max(candidates, key=lambda c: c["bound"])
        if best["oracle"]["infimum"] < best["bound"]:
            logger.error(f"Oracle undercuts the criterion bound {best['bound']} at n0={n0}")
        derivation = {**best, "norm": str(spec)}
        if weights.kind == "bilateral":
            c = self.dilation_constant(weights)
            derivation["dilation_constant"] = c
            derivation["proper_dilation"] = c > 1
        return NotChainRecurrent(
            bound=best["bound"],
            derivation=derivation,
            trace=trace,
            certified=SeqVector.basis(Line(n0), weights.mode),
            alternatives=tuple(c for c in candidates if c is not best),
        )

    def _oracle_check(self, weights: ClassicalWeights, n0: int, case: str) -> dict:
        """Infimum of the reach oracle over the configured horizons."""
        horizon = self.config.oracle_horizon
        if weights.kind == "unilateral":
            params = TruncationParams(1, n0 + horizon + 1)
        else:
            params = TruncationParams(n0 - horizon - 1, n0 + horizon + 1)
        op = self.operator_service.build_classical_shift(weights, params)
        horizons = range(1, horizon + 1)
        if case == "plus":
            source = SeqVector.zero(weights.mode)
            infimum, m = self.certificate_service.oracle_infimum(
                op, source, Line(n0), 1, horizons
            )
            description = {"source": "0", "target": str(n0), "value": "1"}
        else:
            source = SeqVector.basis(Line(n0), weights.mode)
            infimum, m = self.certificate_service.oracle_infimum(
                op, source, lambda length: Line(n0 - length), 0, horizons
            )
            description = {"source": f"e_{n0}", "target": f"{n0}-m", "value": "0"}
        return {**description, "infimum": infimum, "argmin_m": m, "horizon": horizon}

    @staticmethod
    def _plus_terms(
        weights: ClassicalWeights, family: SeminormFamily, n0: int, k: int, m: int
    ) -> list[Real]:
        terms: list[Real] = []
        product: Real = Fraction(1)
        for n in range(1, m + 1):
            index = n0 + n
            weight = weights.weight(index)
            if weight == 0:
                raise ZeroWeightError(index)
            product = product * modulus(weight)
            size = family.basis_norm(Line(index), k)
            terms.append(product / size if size != 0 else math.inf)
        return terms

    @staticmethod
    def _minus_terms(
        weights: ClassicalWeights, family: SeminormFamily, n0: int, k: int, m: int
    ) -> list[Real]:
        terms: list[Real] = []
        product: Real = Fraction(1)
        first = weights.first_index
        for n in range(1, m + 1):
            if first is not None and n0 - n < first:
                break
            index = n0 - (n - 1)
            weight = weights.weight(index)
            if weight == 0:
                raise ZeroWeightError(index)
            product = product * modulus(weight)
            size = family.basis_norm(Line(n0 - n), k)
            terms.append(1 / (product * size) if size != 0 else math.inf)
        return terms

    @staticmethod
    def _available(build, weights, family, n0, k, m) -> list[Real]:
        """Terms up to the first undeclared weight."""
        for count in range(m, -1, -1):
            try:
                return build(weights, family, n0, k, count)
            except MissingWeightError:
                continue
        return []

    def _partial(self, weights: ClassicalWeights, terms: list[Real]) -> SeriesEvaluation:
        return SeriesEvaluation(tuple(terms), sum(terms, self._zero(weights)), None, None, None)

    def _divergent(self, weights: ClassicalWeights, terms: list[Real]) -> SeriesEvaluation:
        return SeriesEvaluation(
            tuple(terms), sum(terms, self._zero(weights)), None, math.inf, False
        )

    def _close(
        self, weights: ClassicalWeights, terms: list[Real], period: int, ratio: Real
    ) -> SeriesEvaluation:
        """Close the series with its periodic tail: each period is ``ratio`` times the last."""
        explicit = sum(terms, self._zero(weights))
        if any(math.isinf(t) for t in terms) or ratio >= 1:
            return SeriesEvaluation(tuple(terms), explicit, ratio, math.inf, False)
        last = sum(terms[-period:], self._zero(weights))
        return SeriesEvaluation(tuple(terms), explicit, ratio, last * ratio / (1 - ratio), True)

    def _reject_zeros(self, weights: ClassicalWeights) -> None:
        lo, hi = self._scan_range(weights)
        if weights.has_zeros(lo, hi):
            zeros = weights.zero_indices(lo, hi)
            raise ZeroWeightError(zeros[0] if zeros else lo)

    def _scan_range(self, weights: ClassicalWeights) -> tuple[int, int]:
        """Index range covering every explicit weight and one period of each tail."""
        lo, hi = self.config.n0_window
        tails = [t for t in (weights.right, weights.left) if t is not None]
        indices = [lo, hi, *weights.explicit, *(t.start for t in tails)]
        period = max((t.period for t in tails), default=1)
        lo, hi = min(indices) - period, max(indices) + period
        if weights.first_index is not None:
            # The root weight never acts.
            lo = max(lo, weights.first_index + 1)
        return lo, max(lo, hi)

    def _n0_range(self, weights: ClassicalWeights) -> tuple[int, int]:
        lo, hi = self.config.n0_window
        if weights.first_index is not None:
            # n0 = 0 sits just below the first vertex of N
            lo = max(lo, weights.first_index - 1)
        return lo, max(lo, hi)

    @staticmethod
    def _family(norms: SeminormFamily | NormSpec) -> SeminormFamily:
        return norms if isinstance(norms, SeminormFamily) else seminorm_family(norms)

    @staticmethod
    def _zero(weights: ClassicalWeights) -> Real:
        return Fraction(0) if weights.mode is ScalarMode.EXACT else 0.0
