"""Tests for delta-chain validation, decomposition and assembly."""

import random
from fractions import Fraction

import pytest

from pyshifts.config import build_default_config
from pyshifts.domain import (
    ClassicalWeights,
    DeltaChain,
    EndpointMismatchError,
    Line,
    LinearOp,
    Lp,
    PerturbationSeq,
    ScalarMode,
    ScalarModeError,
    SeqVector,
    Sup,
    TruncationParams,
    chain_from_json,
)
from pyshifts.services import ChainService, OperatorService


def _create_shift(weight: str = "2", mode: ScalarMode = ScalarMode.EXACT) -> LinearOp:
    """Helper to create a bilateral constant-weight shift on ``-40..10``."""
    weights = ClassicalWeights.constant("bilateral", weight, mode)
    return OperatorService().build_classical_shift(weights, TruncationParams(-40, 10))


def _create_chain_service(**overrides) -> ChainService:
    """Helper to create a chain service with optional config overrides."""
    config = build_default_config(**overrides)
    return ChainService(OperatorService(config), config)


def _e(n: int, coeff=1, mode: ScalarMode = ScalarMode.EXACT) -> SeqVector:
    """Helper to create a basis vector on the line."""
    return SeqVector.basis(Line(n), mode, coeff)


def _random_vector(rng: random.Random, lo: int, hi: int) -> SeqVector:
    """Helper to draw a sparse exact vector supported in ``lo..hi``."""
    size = rng.randint(0, 3)
    entries = {
        Line(rng.randint(lo, hi)): Fraction(rng.randint(-9, 9), rng.randint(1, 9))
        for _ in range(size)
    }
    return SeqVector(entries, ScalarMode.EXACT)


class TestValidation:
    """Test defect computation and the strict tolerance check."""

    def test_step_one_style_chain(self) -> None:
        op = _create_shift()
        service = _create_chain_service()
        vectors = (SeqVector.zero(), _e(2, "1/4"), _e(1, "1/2"), _e(0))
        chain = DeltaChain(vectors, Fraction(1, 2), op, Lp(2))
        result = service.validate(chain)
        assert result.valid
        assert result.defect == Fraction(1, 4)
        assert result.margin == Fraction(1, 4)
        assert result.link_defects == (Fraction(1, 4), 0, 0)

    def test_defect_equal_to_delta_is_rejected(self) -> None:
        op = _create_shift()
        chain = DeltaChain((SeqVector.zero(), _e(0, "1/4")), Fraction(1, 4), op, Sup())
        result = _create_chain_service().validate(chain)
        assert not result.valid
        assert result.margin == 0

    def test_orbit_chain_has_no_defect(self) -> None:
        op = _create_shift()
        service = _create_chain_service()
        chain = service.orbit_chain(op, _e(3), 5, Fraction(1, 100), Lp(2))
        assert chain.end == _e(-2, 32)
        assert service.defect(chain) == 0

    def test_zero_chain(self) -> None:
        op = _create_shift()
        service = _create_chain_service()
        chain = service.zero_chain(op, 3, Fraction(1, 10), Lp(1))
        assert chain.length == 3
        assert service.validate(chain).valid

    def test_chain_needs_two_vectors(self) -> None:
        with pytest.raises(ValueError, match="at least two vectors"):
            DeltaChain((SeqVector.zero(),), Fraction(1), _create_shift(), Lp(2))

    def test_chain_needs_positive_tolerance(self) -> None:
        with pytest.raises(ValueError, match="must be positive"):
            DeltaChain((SeqVector.zero(), SeqVector.zero()), 0, _create_shift(), Lp(2))

    def test_chain_vectors_share_the_operator_mode(self) -> None:
        floating = SeqVector.zero(ScalarMode.FLOAT)
        with pytest.raises(ScalarModeError):
            DeltaChain((floating, floating), Fraction(1), _create_shift(), Lp(2))


class TestPerturbations:
    """Test the perturbation decomposition of chains."""

    def test_perturbations_of_a_small_chain(self) -> None:
        op = _create_shift()
        service = _create_chain_service()
        chain = DeltaChain((_e(1), _e(0, 3), _e(-1, 6)), Fraction(2), op, Lp(2))
        perts = service.to_perturbations(chain)
        assert perts.g == (_e(0), SeqVector.zero())
        assert perts.nonzero_links() == [1]

    def test_reconstruction_of_random_chains(self) -> None:
        rng = random.Random(20240601)
        op = _create_shift()
        service = _create_chain_service()
        for _ in range(500):
            m = rng.randint(1, 6)
            f0 = _random_vector(rng, 0, 10)
            g = tuple(_random_vector(rng, 0, 10) for _ in range(m))
            vectors = [f0]
            for g_l in g:
                vectors.append(service.operator_service.apply(op, vectors[-1]) + g_l)
            chain = DeltaChain(tuple(vectors), Fraction(1), op, Lp(2))

            perts = service.to_perturbations(chain)
            assert perts.g == g
            assert service.reconstruct(f0, perts, op) == chain.end

    def test_reconstruction_of_an_empty_sequence_is_the_start(self) -> None:
        service = _create_chain_service()
        assert service.reconstruct(_e(2), PerturbationSeq(()), _create_shift()) == _e(2)


class TestAssembly:
    """Test concatenation and scaling."""

    def test_exact_concatenation(self) -> None:
        op = _create_shift()
        service = _create_chain_service()
        first = service.orbit_chain(op, _e(2), 2, Fraction(1, 10), Lp(2))
        second = service.orbit_chain(op, _e(0, 4), 1, Fraction(1, 5), Lp(2))
        joined = service.concat(first, second)
        assert joined.length == 3
        assert joined.start == _e(2)
        assert joined.end == _e(-1, 8)
        assert joined.delta == Fraction(1, 5)
        assert joined.junction_tolerance is None

    def test_exact_chains_must_meet(self) -> None:
        op = _create_shift()
        service = _create_chain_service()
        first = service.orbit_chain(op, _e(2), 2, Fraction(1, 10), Lp(2))
        second = service.orbit_chain(op, _e(0), 1, Fraction(1, 10), Lp(2))
        with pytest.raises(EndpointMismatchError, match="next one starts"):
            service.concat(first, second)

    def test_float_junction_within_tolerance_is_recorded(self) -> None:
        op = _create_shift(mode=ScalarMode.FLOAT)
        service = _create_chain_service()
        first = service.orbit_chain(op, _e(1, 1.0, ScalarMode.FLOAT), 1, 0.1, Lp(2))
        second = service.orbit_chain(op, _e(0, 2.0 + 1e-15, ScalarMode.FLOAT), 1, 0.1, Lp(2))
        joined = service.concat(first, second)
        assert joined.junction_tolerance == float(service.config.junction_tolerance)
        assert joined.vectors[1] == second.start

    def test_float_junction_beyond_tolerance(self) -> None:
        op = _create_shift(mode=ScalarMode.FLOAT)
        service = _create_chain_service()
        first = service.orbit_chain(op, _e(1, 1.0, ScalarMode.FLOAT), 1, 0.1, Lp(2))
        second = service.orbit_chain(op, _e(0, 2.5, ScalarMode.FLOAT), 1, 0.1, Lp(2))
        with pytest.raises(EndpointMismatchError, match="exceeds tolerance"):
            service.concat(first, second)

    def test_norms_must_agree(self) -> None:
        op = _create_shift()
        service = _create_chain_service()
        first = service.orbit_chain(op, _e(1), 1, Fraction(1), Lp(2))
        second = service.orbit_chain(op, _e(0, 2), 1, Fraction(1), Sup())
        with pytest.raises(ValueError, match="measured in"):
            service.concat(first, second)

    def test_exact_concatenation_is_associative(self) -> None:
        op = _create_shift()
        service = _create_chain_service()
        a = service.orbit_chain(op, _e(2), 2, Fraction(1, 10), Lp(2))
        b = service.orbit_chain(op, _e(0, 4), 1, Fraction(1, 3), Lp(2))
        c = service.orbit_chain(op, _e(-1, 8), 2, Fraction(1, 5), Lp(2))
        left = service.concat(service.concat(a, b), c)
        right = service.concat(a, service.concat(b, c))
        assert left == right
        assert left.length == 5
        assert left.delta == Fraction(1, 3)
        assert left.junction_tolerance is None

    def test_float_concatenation_is_associative_with_its_tolerance(self) -> None:
        op = _create_shift(mode=ScalarMode.FLOAT)
        service = _create_chain_service()
        a = service.orbit_chain(op, _e(1, 1.0, ScalarMode.FLOAT), 1, 0.1, Lp(2))
        b = service.orbit_chain(op, _e(0, 2.0 + 1e-15, ScalarMode.FLOAT), 1, 0.2, Lp(2))
        c = service.orbit_chain(op, _e(-1, 4.0 + 8e-15, ScalarMode.FLOAT), 1, 0.1, Lp(2))
        left = service.concat(service.concat(a, b), c)
        right = service.concat(a, service.concat(b, c))
        assert left == right
        assert left.delta == 0.2
        assert left.junction_tolerance == float(service.config.junction_tolerance)

    def test_scaling_scales_the_tolerance(self) -> None:
        op = _create_shift()
        service = _create_chain_service()
        chain = DeltaChain((SeqVector.zero(), _e(0, "1/4")), Fraction(1, 2), op, Lp(2))
        scaled = service.scale_chain(-4, chain)
        assert scaled.delta == 2
        assert scaled.end == _e(0, -1)
        assert service.validate(scaled).defect == 4 * service.validate(chain).defect

    def test_scaling_by_zero_is_refused(self) -> None:
        op = _create_shift()
        service = _create_chain_service()
        chain = service.zero_chain(op, 1, Fraction(1), Lp(2))
        with pytest.raises(ValueError, match="zero_chain"):
            service.scale_chain(0, chain)

    def test_endpoint_gap(self) -> None:
        op = _create_shift()
        service = _create_chain_service()
        chain = service.orbit_chain(op, _e(1), 1, Fraction(1), Lp(2))
        assert service.endpoint_gap(chain, _e(1), _e(0, 2)) == 0
        assert service.endpoint_gap(chain, _e(1), _e(0, 3)) == 1


class TestChainSerialisation:
    """Test the JSON form of chains."""

    def test_chain_survives_json(self) -> None:
        op = _create_shift()
        service = _create_chain_service()
        chain = service.orbit_chain(op, _e(2, "1/3"), 2, Fraction(1, 7), Sup())
        rebuilt = chain_from_json(chain.to_json(), op)
        assert rebuilt.vectors == chain.vectors
        assert rebuilt.delta == chain.delta
        assert rebuilt.norm == chain.norm

    def test_chain_for_another_operator_is_refused(self) -> None:
        op = _create_shift()
        chain = _create_chain_service().orbit_chain(op, _e(2), 1, Fraction(1), Lp(2))
        doc = {**chain.to_json(), "operator": "GridT"}
        with pytest.raises(ValueError, match="was built for"):
            chain_from_json(doc, op)
