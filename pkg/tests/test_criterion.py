"""Tests for the series criterion on classical weighted shifts.

Covers:
- Membership for weights whose series diverge
- Exclusion bounds and their oracle cross-check
- Product seminorm families (Frechet spaces)
- Shifts with vanishing weights
- Undeclared tails
"""

from fractions import Fraction

import pytest

from pyshifts.domain import (
    ChainRecurrent,
    ClassicalWeights,
    Inconclusive,
    Line,
    Lp,
    NotApplicableError,
    NotChainRecurrent,
    PeriodicTail,
    ProductSeminorms,
    ScalarMode,
    SeqVector,
    Sup,
    TruncationParams,
    ZeroWeightError,
    breadth_first_exhaustion,
    chunked_exhaustion,
    seminorm_family,
)
from pyshifts.services import (
    CertificateService,
    CriterionService,
    OperatorService,
    TreeBuilderService,
)


def _create_criterion_service() -> CriterionService:
    """Helper to create a criterion service with default config."""
    operator_service = OperatorService()
    return CriterionService(operator_service, CertificateService(operator_service))


def _unilateral(explicit: dict, tail: tuple | None = None) -> ClassicalWeights:
    """Helper to create unilateral weights with an optional constant or periodic right tail."""
    right = PeriodicTail(tuple(Fraction(x) for x in tail), 1) if tail is not None else None
    return ClassicalWeights("unilateral", {n: Fraction(x) for n, x in explicit.items()}, right)


# ===================================================================
# Membership
# ===================================================================


class TestChainRecurrentShifts:
    """Test shifts whose criterion series diverge."""

    def test_unweighted_bilateral_shift(self) -> None:
        verdict = _create_criterion_service().classify_classical(
            ClassicalWeights.constant("bilateral", 1)
        )
        assert isinstance(verdict, ChainRecurrent)
        assert verdict.evidence["required"] == ["S+", "S-"]
        assert verdict.evidence["n0_window"] == [-5, 5]

    def test_expanding_unilateral_shift(self) -> None:
        verdict = _create_criterion_service().classify_classical(
            ClassicalWeights.constant("unilateral", 2)
        )
        assert isinstance(verdict, ChainRecurrent)
        assert verdict.evidence["required"] == ["S+"]
        assert verdict.evidence["n0_window"] == [0, 5]

    def test_sup_norm_gives_the_same_verdict(self) -> None:
        verdict = _create_criterion_service().classify_classical(
            ClassicalWeights.constant("unilateral", 2), Sup()
        )
        assert isinstance(verdict, ChainRecurrent)
        assert verdict.evidence["norm"] == str(Sup())


# ===================================================================
# Exclusion
# ===================================================================


class TestNonRecurrentShifts:
    """Test exclusion bounds derived from a convergent series."""

    def test_bilateral_dilation(self) -> None:
        verdict = _create_criterion_service().classify_classical(
            ClassicalWeights.constant("bilateral", 2)
        )
        assert isinstance(verdict, NotChainRecurrent)
        assert verdict.bound == 1
        assert verdict.derivation["case"] == "S- converges"
        assert verdict.derivation["n0"] == 0
        assert verdict.derivation["dilation_constant"] == 2
        assert verdict.derivation["proper_dilation"] is True
        assert verdict.certified == SeqVector.basis(Line(0), ScalarMode.EXACT)
        assert verdict.alternatives == ()

    def test_bilateral_oracle_never_undercuts_the_bound(self) -> None:
        verdict = _create_criterion_service().classify_classical(
            ClassicalWeights.constant("bilateral", 2)
        )
        oracle = verdict.derivation["oracle"]
        assert oracle["horizon"] == 40
        assert oracle["argmin_m"] == 40
        assert oracle["infimum"] == Fraction(2**40, 2**40 - 1)
        assert oracle["infimum"] >= verdict.bound

    def test_contracting_unilateral_shift(self) -> None:
        verdict = _create_criterion_service().classify_classical(
            ClassicalWeights.constant("unilateral", "1/2")
        )
        assert isinstance(verdict, NotChainRecurrent)
        assert verdict.bound == Fraction(1, 2)
        assert verdict.derivation["case"] == "S+ converges"
        assert verdict.derivation["n0"] == 1
        assert "dilation_constant" not in verdict.derivation
        assert verdict.derivation["oracle"]["infimum"] >= Fraction(1, 2)

    def test_unilateral_sweep_includes_n0_zero(self) -> None:
        verdict = _create_criterion_service().classify_classical(
            ClassicalWeights.constant("unilateral", "1/2")
        )
        rows = {row["n0"]: row for row in verdict.trace}
        assert min(rows) == 0
        assert rows[0]["S+"].converges
        assert rows[0]["chain_recurrent"] is False
        assert verdict.certified == SeqVector.basis(Line(1), ScalarMode.EXACT)

    def test_verdict_json(self) -> None:
        doc = (
            _create_criterion_service()
            .classify_classical(ClassicalWeights.constant("bilateral", 2))
            .to_json()
        )
        assert doc["verdict"] == "NotChainRecurrent"
        assert doc["bound"] == "1"
        assert doc["certified"] == {"0": "1"}

    def test_partial_sums(self) -> None:
        service = _create_criterion_service()
        plus, minus = service.criterion_partial_sums(
            ClassicalWeights.constant("bilateral", 2), Lp(2), 0, 1, 3
        )
        assert plus == 14
        assert minus == Fraction(7, 8)

    def test_unilateral_partial_sums_stop_at_the_first_index(self) -> None:
        service = _create_criterion_service()
        _, minus = service.criterion_partial_sums(
            ClassicalWeights.constant("unilateral", 2), Lp(2), 2, 1, 10
        )
        assert minus == Fraction(1, 2)

    def test_series_closed_form(self) -> None:
        service = _create_criterion_service()
        weights = ClassicalWeights.constant("bilateral", 2)
        minus = service.series_minus(weights, seminorm_family(Lp(2)), 0, 1)
        assert minus.converges is True
        assert minus.ratio == Fraction(1, 2)
        assert minus.total == 1


# ===================================================================
# Product seminorms
# ===================================================================


class TestProductSeminorms:
    """Test shifts on Frechet sequence spaces."""

    def test_breadth_first_exhaustion(self) -> None:
        tree = TreeBuilderService().build_line_tree(TruncationParams(-5, 5))
        spec = ProductSeminorms(breadth_first_exhaustion(tree, Line(0)))
        verdict = _create_criterion_service().classify_classical(
            ClassicalWeights.constant("bilateral", 2), spec
        )
        assert isinstance(verdict, ChainRecurrent)

    def test_chunked_exhaustion(self) -> None:
        spec = ProductSeminorms(chunked_exhaustion([Line(n) for n in range(-5, 6)], 4))
        verdict = _create_criterion_service().classify_classical(
            ClassicalWeights.constant("unilateral", "1/2"), spec
        )
        assert isinstance(verdict, ChainRecurrent)


# ===================================================================
# Zero weights
# ===================================================================


class TestZeroWeights:
    """Test shifts whose weights vanish somewhere."""

    def test_classification_refuses_zero_weights(self) -> None:
        with pytest.raises(ZeroWeightError) as exc:
            _create_criterion_service().classify_classical(_unilateral({3: 0}, (2,)))
        assert exc.value.index == 3

    def test_zeros_unbounded_above(self) -> None:
        report = _create_criterion_service().zero_weight_analysis(_unilateral({}, (0, 2)))
        assert report.unbounded_above
        assert report.subspace == "zero"
        assert report.n0 is None
        assert isinstance(report.restriction, ChainRecurrent)

    def test_last_zero_before_a_divergent_tail(self) -> None:
        report = _create_criterion_service().zero_weight_analysis(_unilateral({3: 0}, (2,)))
        assert report.zero_indices == (3,)
        assert not report.unbounded_above
        assert report.n0 == 3
        assert report.subspace == "Y+"
        assert isinstance(report.restriction, ChainRecurrent)

    def test_last_zero_before_a_convergent_tail(self) -> None:
        report = _create_criterion_service().zero_weight_analysis(_unilateral({3: 0}, ("1/2",)))
        assert report.n0 == 3
        assert report.subspace == "zero"

    def test_undeclared_right_tail(self) -> None:
        report = _create_criterion_service().zero_weight_analysis(
            _unilateral({1: 1, 2: 0, 3: 1})
        )
        assert report.zero_indices == (2,)
        assert report.subspace is None
        assert isinstance(report.restriction, Inconclusive)

    def test_no_zero_weight(self) -> None:
        with pytest.raises(NotApplicableError, match="No weight vanishes"):
            _create_criterion_service().zero_weight_analysis(
                ClassicalWeights.constant("unilateral", 2)
            )


# ===================================================================
# Undecidable input
# ===================================================================


class TestUndecidable:
    """Test inputs the criterion cannot settle."""

    def test_undeclared_tail_is_inconclusive(self) -> None:
        weights = _unilateral({n: 2 for n in range(1, 11)})
        verdict = _create_criterion_service().classify_classical(weights)
        assert isinstance(verdict, Inconclusive)
        assert "undeclared" in verdict.reason

    def test_dilation_constant_needs_a_bilateral_shift(self) -> None:
        service = _create_criterion_service()
        with pytest.raises(NotApplicableError, match="unilateral"):
            service.dilation_constant(ClassicalWeights.constant("unilateral", 2))

    def test_dilation_constant_needs_both_tails(self) -> None:
        weights = ClassicalWeights("bilateral", right=PeriodicTail((Fraction(2),), 0))
        with pytest.raises(NotApplicableError, match="both weight tails"):
            _create_criterion_service().dilation_constant(weights)
