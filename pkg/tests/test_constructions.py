"""Tests for the explicit chains that put the line basis vectors in the recurrent set.

Covers:
- Minimal lengths m1, m2 and n from their defining inequalities
- Step 1 (0 -> e_0), Step 2 on the comb and for the grid operator
- Shifted chains for e_n, membership witnesses and window planning
- Truncation and applicability errors
"""

from fractions import Fraction

import pytest

from pyshifts.domain import (
    Branch,
    ClassicalWeights,
    Direction,
    Line,
    LinearOp,
    Lp,
    NotApplicableError,
    OpFamily,
    RecipeKind,
    ScalarMode,
    SeqVector,
    TruncationError,
    TruncationParams,
    WeightAssignment,
)
from pyshifts.services import ChainService, ConstructionService, OperatorService

WEIGHT_GRID = [("3/2", "2"), ("2", "4"), ("3", "5")]
DELTAS = ["1", "1/10", "1/100", "1/1000"]
FAMILIES = [OpFamily.COMB_SHIFT, OpFamily.GRID_T]


def _create_construction_service() -> ConstructionService:
    """Helper to create a construction service with its dependencies."""
    operator_service = OperatorService()
    return ConstructionService(operator_service, ChainService(operator_service))


def _create_weights(
    mu1: str = "2", mu2: str = "4", mode: ScalarMode = ScalarMode.EXACT
) -> WeightAssignment:
    """Helper to create comb/grid weights."""
    return WeightAssignment(Fraction(mu1), Fraction(mu2), mode=mode)


def _build_operator(
    service: ConstructionService,
    family: OpFamily,
    weights: WeightAssignment,
    n: int,
    delta,
    direction: Direction | None = None,
) -> LinearOp:
    """Helper to build the operator on the window a chain for ``e_n`` needs."""
    window = service.plan_window(n, delta, weights, family, direction)
    return service.operator_service.build_for_family(family, weights, window)


# ===================================================================
# Lengths
# ===================================================================


class TestLengths:
    """Test the minimal chain lengths."""

    def test_reference_lengths(self) -> None:
        delta = Fraction(1, 10)
        assert ConstructionService.m1_for(delta, Fraction(2)) == 5
        assert ConstructionService.m2_for_comb(delta, Fraction(2), Fraction(4)) == 6
        assert ConstructionService.n_for_grid(delta, Fraction(2), Fraction(4)) == 6

    @pytest.mark.parametrize(("mu1", "mu2"), WEIGHT_GRID)
    @pytest.mark.parametrize("delta", DELTAS)
    def test_m1_is_minimal(self, mu1: str, mu2: str, delta: str) -> None:
        a, d = Fraction(mu1), Fraction(delta)
        m1 = ConstructionService.m1_for(d, a)
        assert m1 > 1
        assert 1 < d * a ** (m1 - 1)
        if m1 > 2:
            assert not 1 < d * a ** (m1 - 2)

    @pytest.mark.parametrize(("mu1", "mu2"), WEIGHT_GRID)
    @pytest.mark.parametrize("delta", DELTAS)
    def test_m2_is_minimal(self, mu1: str, mu2: str, delta: str) -> None:
        a, b, d = Fraction(mu1), Fraction(mu2), Fraction(delta)
        m2 = ConstructionService.m2_for_comb(d, a, b)
        assert m2 > 1
        assert a**m2 < d * b ** (m2 - 1)
        if m2 > 2:
            assert not a ** (m2 - 1) < d * b ** (m2 - 2)

    def test_non_positive_delta(self) -> None:
        with pytest.raises(ValueError, match="delta must be positive"):
            ConstructionService.m1_for(Fraction(0), Fraction(2))

    def test_step_one_needs_an_expanding_line(self) -> None:
        with pytest.raises(ValueError, match="\\|mu1\\| > 1"):
            ConstructionService.m1_for(Fraction(1, 10), Fraction(1))

    def test_step_two_needs_a_stronger_branch(self) -> None:
        with pytest.raises(ValueError, match="\\|mu1\\| < \\|mu2\\|"):
            ConstructionService.m2_for_comb(Fraction(1, 10), Fraction(4), Fraction(2))


# ===================================================================
# Steps
# ===================================================================


class TestStepOne:
    """Test the chain from 0 to e_0."""

    def test_reference_chain(self) -> None:
        service = _create_construction_service()
        weights = _create_weights()
        delta = Fraction(1, 10)
        op = _build_operator(
            service, OpFamily.COMB_SHIFT, weights, 0, delta, Direction.FROM_ZERO
        )
        chain = service.chain_zero_to_e0(delta, op)
        assert chain.length == 5
        assert chain.start.is_zero()
        assert chain.end == SeqVector.basis(Line(0))
        assert chain.vectors[1] == SeqVector.basis(Line(4), coeff=Fraction(1, 16))
        result = service.chain_service.validate(chain)
        assert result.valid
        assert result.defect == Fraction(1, 16)
        assert chain.recipe.kind is RecipeKind.STEP1
        assert chain.recipe.lengths == {"m1": 5}
        assert chain.recipe.direction is Direction.FROM_ZERO

    @pytest.mark.parametrize("family", FAMILIES)
    @pytest.mark.parametrize(("mu1", "mu2"), WEIGHT_GRID)
    @pytest.mark.parametrize("delta", DELTAS)
    def test_valid_on_the_whole_grid(
        self, family: OpFamily, mu1: str, mu2: str, delta: str
    ) -> None:
        service = _create_construction_service()
        weights = _create_weights(mu1, mu2)
        d = Fraction(delta)
        op = _build_operator(service, family, weights, 0, d, Direction.FROM_ZERO)
        chain = service.chain_zero_to_e0(d, op)
        assert chain.length == service.m1_for(d, weights.mu1)
        assert chain.start.is_zero()
        assert chain.end == SeqVector.basis(Line(0))
        assert service.chain_service.validate(chain).valid


class TestStepTwoComb:
    """Test the comb chain from e_0 to 0."""

    def test_reference_chain(self) -> None:
        service = _create_construction_service()
        weights = _create_weights()
        delta = Fraction(1, 10)
        op = _build_operator(service, OpFamily.COMB_SHIFT, weights, 0, delta, Direction.TO_ZERO)
        chain = service.chain_e0_to_zero_comb(delta, op)
        assert chain.length == 6
        assert chain.start == SeqVector.basis(Line(0))
        assert chain.end.is_zero()
        result = service.chain_service.validate(chain)
        assert result.valid
        assert result.defect == Fraction(1, 16)
        assert chain.recipe.kind is RecipeKind.STEP2_COMB
        assert chain.recipe.lengths == {"m2": 6, "branch": 6}
        assert chain.recipe.window == TruncationParams(-6, 1, 6)

    def test_single_perturbation_on_the_finger(self) -> None:
        service = _create_construction_service()
        weights = _create_weights()
        delta = Fraction(1, 10)
        op = _build_operator(service, OpFamily.COMB_SHIFT, weights, 0, delta, Direction.TO_ZERO)
        chain = service.chain_e0_to_zero_comb(delta, op)
        perts = service.chain_service.to_perturbations(chain)
        assert perts.nonzero_links() == [1]
        assert perts.g[0] == SeqVector.basis(Branch(6, 5), coeff=Fraction(-1, 16))

    @pytest.mark.parametrize(("mu1", "mu2"), WEIGHT_GRID)
    @pytest.mark.parametrize("delta", DELTAS)
    def test_valid_on_the_whole_grid(self, mu1: str, mu2: str, delta: str) -> None:
        service = _create_construction_service()
        weights = _create_weights(mu1, mu2)
        d = Fraction(delta)
        op = _build_operator(service, OpFamily.COMB_SHIFT, weights, 0, d, Direction.TO_ZERO)
        chain = service.chain_e0_to_zero_comb(d, op)
        assert chain.length == service.m2_for_comb(d, weights.mu1, weights.mu2)
        assert chain.end.is_zero()
        assert service.chain_service.validate(chain).valid


class TestStepTwoGrid:
    """Test the chain from e_0 to 0 for the invertible operator."""

    def test_reference_chain(self) -> None:
        service = _create_construction_service()
        weights = _create_weights()
        delta = Fraction(1, 10)
        op = _build_operator(service, OpFamily.GRID_T, weights, 0, delta, Direction.TO_ZERO)
        chain = service.chain_e0_to_zero_grid(delta, op)
        assert chain.length == 11
        assert chain.start == SeqVector.basis(Line(0))
        assert chain.end.is_zero()
        result = service.chain_service.validate(chain)
        assert result.valid
        assert result.defect == Fraction(1, 16)
        assert [d for d in result.link_defects if d != 0] == [Fraction(1, 16)] * 2
        assert chain.recipe.kind is RecipeKind.STEP2_GRID
        assert chain.recipe.lengths == {"n_branch": 6, "m2": 11, "branch": 6}

    def test_chain_passes_through_the_lower_branch(self) -> None:
        service = _create_construction_service()
        weights = _create_weights()
        delta = Fraction(1, 10)
        op = _build_operator(service, OpFamily.GRID_T, weights, 0, delta, Direction.TO_ZERO)
        chain = service.chain_e0_to_zero_grid(delta, op)
        assert chain.vectors[6] == SeqVector.basis(Branch(6, 0), coeff=-64)
        assert chain.vectors[10] == SeqVector.basis(Branch(6, -4), coeff=Fraction(-1, 4))

    @pytest.mark.parametrize(("mu1", "mu2"), WEIGHT_GRID)
    @pytest.mark.parametrize("delta", DELTAS)
    def test_valid_on_the_whole_grid(self, mu1: str, mu2: str, delta: str) -> None:
        service = _create_construction_service()
        weights = _create_weights(mu1, mu2)
        d = Fraction(delta)
        op = _build_operator(service, OpFamily.GRID_T, weights, 0, d, Direction.TO_ZERO)
        chain = service.chain_e0_to_zero_grid(d, op)
        n = service.n_for_grid(d, weights.mu1, weights.mu2)
        assert chain.length == 2 * n - 1
        assert chain.end.is_zero()
        assert service.chain_service.validate(chain).valid


# ===================================================================
# Membership
# ===================================================================


class TestMembership:
    """Test chains between 0 and any line basis vector."""

    @pytest.mark.parametrize("family", FAMILIES)
    @pytest.mark.parametrize("n", [-3, -2, -1, 0, 1, 2, 3])
    def test_round_trip_through_zero(self, family: OpFamily, n: int) -> None:
        service = _create_construction_service()
        weights = _create_weights()
        delta = Fraction(1, 10)
        window = service.plan_window(n, delta, weights, family)
        op = service.operator_service.build_for_family(family, weights, window)
        chain = service.membership_witness(n, delta, op)
        e_n = SeqVector.basis(Line(n))
        assert chain.start == e_n
        assert chain.end == e_n
        assert service.chain_service.validate(chain).valid
        assert service.chain_service.endpoint_gap(chain, e_n, e_n) == 0
        assert chain.recipe.kind is RecipeKind.MEMBERSHIP
        lengths = chain.recipe.lengths
        assert chain.length == lengths["to_zero"] + lengths["from_zero"]
        assert service.required_window(chain.recipe) == window

    def test_positive_index_runs_the_orbit_first(self) -> None:
        service = _create_construction_service()
        weights = _create_weights()
        delta = Fraction(1, 10)
        op = _build_operator(service, OpFamily.COMB_SHIFT, weights, 2, delta, Direction.TO_ZERO)
        chain = service.chain_for_basis(2, delta, op, Direction.TO_ZERO)
        assert chain.recipe.kind is RecipeKind.SHIFTED_PLUS_N
        assert chain.recipe.lengths["orbit"] == 2
        assert chain.vectors[2] == SeqVector.basis(Line(0), coeff=4)
        assert chain.delta == delta
        assert service.chain_service.validate(chain).valid

    def test_negative_index_uses_a_deeper_branch(self) -> None:
        service = _create_construction_service()
        weights = _create_weights()
        delta = Fraction(1, 10)
        op = _build_operator(service, OpFamily.COMB_SHIFT, weights, -2, delta, Direction.TO_ZERO)
        chain = service.chain_for_basis(-2, delta, op, Direction.TO_ZERO)
        assert chain.recipe.kind is RecipeKind.SHIFTED_MINUS_N
        assert chain.recipe.lengths["branch"] == 8
        assert chain.end.is_zero()

    def test_from_zero_is_a_shifted_step_one(self) -> None:
        service = _create_construction_service()
        weights = _create_weights()
        delta = Fraction(1, 10)
        op = _build_operator(service, OpFamily.GRID_T, weights, 3, delta, Direction.FROM_ZERO)
        chain = service.chain_for_basis(3, delta, op, Direction.FROM_ZERO)
        assert chain.length == 5
        assert chain.end == SeqVector.basis(Line(3))

    @pytest.mark.parametrize("family", FAMILIES)
    @pytest.mark.parametrize(("mu1", "mu2"), [("3/2", "2"), ("2", "4")])
    def test_floating_point_witness(self, family: OpFamily, mu1: str, mu2: str) -> None:
        service = _create_construction_service()
        weights = _create_weights(mu1, mu2, ScalarMode.FLOAT)
        window = service.plan_window(1, 0.01, weights, family)
        op = service.operator_service.build_for_family(family, weights, window)
        chain = service.membership_witness(1, 0.01, op)
        e_1 = SeqVector.basis(Line(1), ScalarMode.FLOAT)
        assert service.chain_service.validate(chain).valid
        gap = service.chain_service.endpoint_gap(chain, e_1, e_1)
        assert gap <= service.config.junction_tolerance


class TestConstructionErrors:
    """Test refusals of the construction service."""

    @pytest.mark.parametrize("delta", DELTAS)
    def test_planned_comb_window_is_tight(self, delta: str) -> None:
        service = _create_construction_service()
        weights = _create_weights()
        window = service.plan_window(
            0, Fraction(delta), weights, OpFamily.COMB_SHIFT, Direction.TO_ZERO
        )
        op = service.operator_service.build_comb_shift(weights, window)
        chain = service.chain_e0_to_zero_comb(Fraction(delta), op)
        assert service.chain_service.validate(chain).valid

        smaller = TruncationParams(window.n_min, window.n_max, window.k_max - 1)
        op = service.operator_service.build_comb_shift(weights, smaller)
        with pytest.raises(TruncationError, match="does not fit the window"):
            service.chain_e0_to_zero_comb(Fraction(delta), op)

    @pytest.mark.parametrize("delta", ["1/10", "1/100"])
    def test_planned_grid_window_is_tight(self, delta: str) -> None:
        service = _create_construction_service()
        weights = _create_weights()
        window = service.plan_window(
            0, Fraction(delta), weights, OpFamily.GRID_T, Direction.TO_ZERO
        )
        op = service.operator_service.build_for_family(OpFamily.GRID_T, weights, window)
        chain = service.chain_e0_to_zero_grid(Fraction(delta), op)
        assert service.chain_service.validate(chain).valid

        smaller = TruncationParams(
            window.n_min, window.n_max, window.k_max, window.j_min, window.j_max - 1
        )
        op = service.operator_service.build_for_family(OpFamily.GRID_T, weights, smaller)
        with pytest.raises(TruncationError, match="does not fit the window"):
            service.chain_e0_to_zero_grid(Fraction(delta), op)

    def test_classical_shift_has_no_recipe(self) -> None:
        service = _create_construction_service()
        op = service.operator_service.build_classical_shift(
            ClassicalWeights.constant("bilateral", 2), TruncationParams(-5, 5)
        )
        with pytest.raises(NotApplicableError, match="comb shift or the grid operator"):
            service.chain_for_basis(0, Fraction(1, 10), op, Direction.FROM_ZERO)

    def test_grid_recipe_on_the_comb(self) -> None:
        service = _create_construction_service()
        op = service.operator_service.build_comb_shift(
            _create_weights(), TruncationParams(-6, 1, 6)
        )
        with pytest.raises(NotApplicableError, match="Recipe needs GridT"):
            service.chain_e0_to_zero_grid(Fraction(1, 10), op)

    def test_no_window_plan_for_classical_shifts(self) -> None:
        service = _create_construction_service()
        with pytest.raises(NotApplicableError, match="No line chains"):
            service.plan_window(0, Fraction(1, 10), _create_weights(), OpFamily.CLASSICAL_SHIFT)

    def test_recipe_json(self) -> None:
        service = _create_construction_service()
        weights = _create_weights()
        delta = Fraction(1, 10)
        op = _build_operator(service, OpFamily.COMB_SHIFT, weights, 0, delta, Direction.TO_ZERO)
        doc = service.chain_e0_to_zero_comb(delta, op).recipe.to_json()
        assert doc["kind"] == "Step2Comb"
        assert doc["delta"] == "1/10"
        assert doc["window"] == {"n_min": -6, "n_max": 1, "k_max": 6, "j_min": 0, "j_max": 0}
        assert doc["direction"] == "ToZero"
