"""Validation, decomposition and assembly of delta-chains."""

import logging
from fractions import Fraction

from pyshifts.config import VerificationConfig, build_default_config
from pyshifts.domain import (
    ChainRecipe,
    ChainValidation,
    DeltaChain,
    EndpointMismatchError,
    LinearOp,
    NormSpec,
    PerturbationSeq,
    ScalarMode,
    SeqVector,
    norm,
)
from pyshifts.domain.scalars import Real, Scalar, modulus

from .operator_service import OperatorService

logger = logging.getLogger(__name__)


class ChainService:
    """Operations on delta-chains.

    A chain ``f_0, ..., f_m`` is a delta-chain when every link error
    ``||f_l - T f_(l-1)||`` is strictly below ``delta``.  The perturbations
    ``g_l = f_l - T f_(l-1)`` determine the end point through
    ``f_m = T^m f_0 + sum_l T^(m-l) g_l``.
    """

    def __init__(
        self, operator_service: OperatorService, config: VerificationConfig | None = None
    ):
        """Initialize service with dependencies.

        Args:
            operator_service: Service used to apply chain operators
            config: Verification tolerances (junction tolerance for floats)
        """
        self.operator_service = operator_service
        self.config = config or build_default_config()

    def link_defects(self, chain: DeltaChain) -> tuple[Real, ...]:
        """``||f_l - T f_(l-1)||`` for ``l = 1..m``.

        Raises:
            LeakageOutOfWindowError: If a link needs a vertex outside the window
        """
        return tuple(norm(g, chain.norm) for g in self.to_perturbations(chain).g)

    def defect(self, chain: DeltaChain) -> Real:
        """Largest link error of the chain."""
        return max(self.link_defects(chain))

    def validate(self, chain: DeltaChain) -> ChainValidation:
        """Check ``defect < delta`` (strict) and record the margin."""
        links = self.link_defects(chain)
        worst = max(links)
        valid = worst < chain.delta
        if not valid:
            logger.error(
                f"Chain of length {chain.length} has defect {worst} >= delta {chain.delta}"
            )
        else:
            logger.debug(f"Chain of length {chain.length}: defect {worst} < delta {chain.delta}")
        return ChainValidation(worst, chain.delta - worst, valid, links)

    def to_perturbations(self, chain: DeltaChain) -> PerturbationSeq:
        """``g_l = f_l - T f_(l-1)`` for every link."""
        op = chain.op
        return PerturbationSeq(
            tuple(
                f - self.operator_service.apply(op, prev, step)
                for step, (prev, f) in enumerate(zip(chain.vectors, chain.vectors[1:]), start=1)
            )
        )

    def reconstruct(self, f0: SeqVector, perts: PerturbationSeq, op: LinearOp) -> SeqVector:
        """``T^m f_0 + sum_l T^(m-l) g_l``.

        Evaluated in nested form ``T(...T(T f_0 + g_1) + g_2 ...) + g_m``, which
        is the same sum; exact mode reproduces the chain end point exactly.
        """
        acc = f0
        for step, g in enumerate(perts.g, start=1):
            acc = self.operator_service.apply(op, acc, step) + g
        return acc

    def concat(
        self, c1: DeltaChain, c2: DeltaChain, recipe: ChainRecipe | None = None
    ) -> DeltaChain:
        """Join ``c1`` and ``c2`` at the end point of ``c1``.

        Exact chains must meet exactly.  Floating-point chains may meet within
        the configured junction tolerance, which is then recorded on the result;
        the junction vector is the start of ``c2``.
        The tolerance of the result is the larger of the two.

        Raises:
            EndpointMismatchError: If the chains do not meet
            ValueError: If the chains use different operators or norms
        """
        if c1.op is not c2.op and (c1.op.family, c1.op.vertices) != (c2.op.family, c2.op.vertices):
            raise ValueError("Cannot concatenate chains for different operators")
        if c1.norm != c2.norm:
            raise ValueError(f"Cannot concatenate chains measured in {c1.norm} and {c2.norm}")

        tolerance = None
        if c1.end != c2.start:
            if c1.op.mode is ScalarMode.EXACT:
                raise EndpointMismatchError(
                    f"Chain ends at {c1.end} but the next one starts at {c2.start}"
                )
            gap = norm(c1.end - c2.start, c1.norm)
            limit = float(self.config.junction_tolerance)
            if gap > limit:
                raise EndpointMismatchError(f"Junction gap {gap} exceeds tolerance {limit}")
            logger.debug(f"Accepted floating-point junction with gap {gap}")
            tolerance = limit
        recorded = [
            t for t in (c1.junction_tolerance, c2.junction_tolerance, tolerance) if t is not None
        ]
        return DeltaChain(
            vectors=c1.vectors[:-1] + c2.vectors,
            delta=max(c1.delta, c2.delta),
            op=c1.op,
            norm=c1.norm,
            recipe=recipe,
            junction_tolerance=max(recorded) if recorded else None,
        )

    def scale_chain(self, alpha: Scalar, chain: DeltaChain) -> DeltaChain:
        """Multiply every vector by ``alpha``; the tolerance becomes ``|alpha| delta``.

        Raises:
            ValueError: If ``alpha`` is zero (use :meth:`zero_chain` instead)
        """
        if alpha == 0:
            raise ValueError("Scaling by zero degenerates the chain; use zero_chain")
        return DeltaChain(
            vectors=tuple(f.scale(alpha) for f in chain.vectors),
            delta=modulus(alpha) * chain.delta,
            op=chain.op,
            norm=chain.norm,
            recipe=chain.recipe,
            junction_tolerance=chain.junction_tolerance,
        )

    def orbit_chain(
        self, op: LinearOp, f0: SeqVector, m: int, delta: Real, norm_spec: NormSpec
    ) -> DeltaChain:
        """The true orbit segment ``f_l = T^l f_0``, ``l = 0..m``."""
        if m < 1:
            raise ValueError(f"Chain length must be at least 1, got {m}")
        vectors = [f0]
        for step in range(1, m + 1):
            vectors.append(self.operator_service.apply(op, vectors[-1], step))
        return DeltaChain(tuple(vectors), delta, op, norm_spec)

    def zero_chain(self, op: LinearOp, m: int, delta: Real, norm_spec: NormSpec) -> DeltaChain:
        """The constant chain at the zero vector."""
        if m < 1:
            raise ValueError(f"Chain length must be at least 1, got {m}")
        zeros = tuple(SeqVector.zero(op.mode) for _ in range(m + 1))
        return DeltaChain(zeros, delta, op, norm_spec)

    @staticmethod
    def endpoint_gap(chain: DeltaChain, start: SeqVector, end: SeqVector) -> Real:
        """Largest distance of the chain's end points from the intended ones."""
        zero = Fraction(0) if chain.op.mode is ScalarMode.EXACT else 0.0
        return max(zero, norm(chain.start - start, chain.norm), norm(chain.end - end, chain.norm))
