"""Explicit delta-chains between the line basis vectors and the zero vector."""

import logging
from dataclasses import replace

from pyshifts.config import VerificationConfig, build_default_config
from pyshifts.domain import (
    Branch,
    ChainRecipe,
    DeltaChain,
    Direction,
    LeakageOutOfWindowError,
    Line,
    LinearOp,
    Lp,
    NormSpec,
    NotApplicableError,
    OpFamily,
    RecipeKind,
    ScalarMode,
    SeqVector,
    TruncationError,
    TruncationParams,
    WeightAssignment,
)
from pyshifts.domain.scalars import Real, Scalar, modulus, reciprocal

from .chain_service import ChainService
from .operator_service import OperatorService

logger = logging.getLogger(__name__)

_FAMILIES = (OpFamily.COMB_SHIFT, OpFamily.GRID_T)


def merge_windows(*windows: TruncationParams) -> TruncationParams:
    """Smallest window containing every given window."""
    return TruncationParams(
        n_min=min(w.n_min for w in windows),
        n_max=max(w.n_max for w in windows),
        k_max=max(w.k_max for w in windows),
        j_min=min(w.j_min for w in windows),
        j_max=max(w.j_max for w in windows),
    )


def lift_window(window: TruncationParams, family: OpFamily) -> TruncationParams:
    """Enlarge ``window`` just enough to be a valid window for ``family``'s tree."""
    if family is OpFamily.COMB_SHIFT:
        k_max = max(window.k_max, 1)
        return TruncationParams(min(window.n_min, -k_max), max(window.n_max, 1), k_max)
    if family in (OpFamily.GRID_T, OpFamily.GRID_T_INVERSE) and window.k_max > 0:
        return TruncationParams(
            min(window.n_min, -window.k_max),
            max(window.n_max, 1),
            window.k_max,
            min(window.j_min, -1),
            max(window.j_max, 1),
        )
    return window


class ConstructionService:
    """Builds the delta-chains that place the line basis vectors in the chain recurrent set.

    Every chain is length-minimal for its tolerance and carries a
    :class:`ChainRecipe` recording the derived lengths, the defining
    inequalities and the smallest window the chain fits in.  A window that is
    too small is reported as :class:`TruncationError`.
    """

    def __init__(
        self,
        operator_service: OperatorService,
        chain_service: ChainService,
        config: VerificationConfig | None = None,
    ):
        """Initialize service with dependencies.

        Args:
            operator_service: Service used to apply the operators
            chain_service: Service used to join, scale and check chains
            config: Verification configuration
        """
        self.operator_service = operator_service
        self.chain_service = chain_service
        self.config = config or build_default_config()

    # ------------------------------------------------------------------
    # Lengths
    # ------------------------------------------------------------------

    @staticmethod
    def m1_for(delta: Real, mu1: Scalar) -> int:
        """Smallest ``m > 1`` with ``1 < delta |mu1|^(m-1)``.

        Raises:
            ValueError: If ``delta <= 0`` or ``|mu1| <= 1``
        """
        if not delta > 0:
            raise ValueError(f"delta must be positive, got {delta}")
        a = modulus(mu1)
        if a <= 1:
            raise ValueError(f"Step 1 needs |mu1| > 1, got |mu1|={a}")
        m = 2
        while not 1 < delta * a ** (m - 1):
            m += 1
        return m

    @staticmethod
    def m2_for_comb(delta: Real, mu1: Scalar, mu2: Scalar) -> int:
        """Smallest ``m > 1`` with ``|mu1|^m < delta |mu2|^(m-1)``.

        Raises:
            ValueError: If ``delta <= 0`` or ``|mu2| <= |mu1|``
        """
        if not delta > 0:
            raise ValueError(f"delta must be positive, got {delta}")
        a, b = modulus(mu1), modulus(mu2)
        if b <= a:
            raise ValueError(f"Step 2 needs |mu1| < |mu2|, got {a} and {b}")
        m = 2
        while not a**m < delta * b ** (m - 1):
            m += 1
        return m

    @classmethod
    def n_for_grid(cls, delta: Real, mu1: Scalar, mu2: Scalar) -> int:
        """Branch index ``n`` of the invertible Step 2 (same inequality as the comb)."""
        return cls.m2_for_comb(delta, mu1, mu2)

    # ------------------------------------------------------------------
    # Steps
    # ------------------------------------------------------------------

    def chain_zero_to_e0(
        self, delta: Real, op: LinearOp, norm_spec: NormSpec | None = None
    ) -> DeltaChain:
        """Step 1: the chain ``0, (1/mu1)^(m1-1) e_(m1-1), ..., e_0``."""
        return self._step1(0, delta, op, norm_spec or Lp(2))

    def chain_e0_to_zero_comb(
        self, delta: Real, op: LinearOp, norm_spec: NormSpec | None = None
    ) -> DeltaChain:
        """Step 2 on the comb: one perturbation on finger ``-m2`` cancels the orbit of ``e_0``."""
        return self._step2_comb(0, delta, op, norm_spec or Lp(2))

    def chain_e0_to_zero_grid(
        self, delta: Real, op: LinearOp, norm_spec: NormSpec | None = None
    ) -> DeltaChain:
        """Step 2 for ``T``: a perturbation on branch ``-n`` and a final jump to 0."""
        return self._step2_grid(0, delta, op, norm_spec or Lp(2))

    def chain_for_basis(
        self,
        n: int,
        delta: Real,
        op: LinearOp,
        direction: Direction,
        norm_spec: NormSpec | None = None,
    ) -> DeltaChain:
        """Delta-chain between 0 and ``e_n`` in the requested direction.

        ``e_(-n)`` uses Step 1 or Step 2 with every index shifted by ``-n``
        (Step 2 then needs branch ``k = m2 + n``).  ``e_n`` towards zero runs
        the exact orbit ``e_n -> mu1^n e_0`` and continues with a Step 2 chain
        built for ``delta / |mu1|^n`` and scaled by ``mu1^n``.

        Raises:
            TruncationError: If the operator window is too small
            NotApplicableError: If ``op`` is neither the comb shift nor ``T``
        """
        spec = norm_spec or Lp(2)
        if direction is Direction.FROM_ZERO:
            return self._step1(n, delta, op, spec)
        if n <= 0:
            return self._step2(-n, delta, op, spec)

        weights = self._weights(op)
        scale = weights.mu1**n
        e_n = SeqVector.basis(Line(n), op.mode)
        orbit = self._checked(
            lambda: self.chain_service.orbit_chain(op, e_n, n, delta, spec), op, "orbit prefix"
        )
        tail = self._step2(0, delta / modulus(weights.mu1) ** n, op, spec)
        tail = self.chain_service.scale_chain(scale, tail)
        orbit_window = lift_window(TruncationParams(0, n), op.family)
        recipe = ChainRecipe(
            kind=RecipeKind.SHIFTED_PLUS_N,
            delta=delta,
            n=n,
            lengths={"orbit": n, **tail.recipe.lengths},
            window=merge_windows(orbit_window, tail.recipe.window),
            inequalities=(f"orbit e_{n} -> mu1^{n} e_0 is exact", *tail.recipe.inequalities),
            direction=Direction.TO_ZERO,
            parts=(tail.recipe,),
        )
        joined = self.chain_service.concat(orbit, tail)
        return replace(joined, delta=delta, recipe=recipe)

    def membership_witness(
        self, n: int, delta: Real, op: LinearOp, norm_spec: NormSpec | None = None
    ) -> DeltaChain:
        """Delta-chain from ``e_n`` to 0 and back to ``e_n``."""
        down = self.chain_for_basis(n, delta, op, Direction.TO_ZERO, norm_spec)
        up = self.chain_for_basis(n, delta, op, Direction.FROM_ZERO, norm_spec)
        recipe = ChainRecipe(
            kind=RecipeKind.MEMBERSHIP,
            delta=delta,
            n=n,
            lengths={"to_zero": down.length, "from_zero": up.length},
            window=merge_windows(down.recipe.window, up.recipe.window),
            parts=(down.recipe, up.recipe),
        )
        return self.chain_service.concat(down, up, recipe)

    @staticmethod
    def required_window(recipe: ChainRecipe) -> TruncationParams:
        """Smallest window the recipe's chain fits in."""
        if recipe.window is None:
            raise ValueError(f"Recipe {recipe.kind.value} records no window")
        return recipe.window

    def plan_window(
        self,
        n: int,
        delta: Real,
        weights: WeightAssignment,
        family: OpFamily,
        direction: Direction | None = None,
    ) -> TruncationParams:
        """Window :meth:`chain_for_basis` will need, known before any operator is built.

        Without a direction the window of :meth:`membership_witness` is returned.
        """
        if family not in _FAMILIES:
            raise NotApplicableError(f"No line chains for {family.value}")
        if direction is None:
            return merge_windows(
                self.plan_window(n, delta, weights, family, Direction.TO_ZERO),
                self.plan_window(n, delta, weights, family, Direction.FROM_ZERO),
            )
        if direction is Direction.FROM_ZERO:
            return self._step1_window(n, delta, weights, family)
        if n <= 0:
            return self._step2_window(-n, delta, weights, family)
        tail_delta = delta / modulus(weights.mu1) ** n
        return merge_windows(
            lift_window(TruncationParams(0, n), family),
            self._step2_window(0, tail_delta, weights, family),
        )

    def _step1_window(
        self, t: int, delta: Real, weights: WeightAssignment, family: OpFamily
    ) -> TruncationParams:
        m1 = self.m1_for(delta, weights.mu1)
        return lift_window(TruncationParams(t, t + m1 - 1), family)

    def _step2_window(
        self, s: int, delta: Real, weights: WeightAssignment, family: OpFamily
    ) -> TruncationParams:
        if family is OpFamily.COMB_SHIFT:
            k = self.m2_for_comb(delta, weights.mu1, weights.mu2) + s
            return TruncationParams(-k, 1, k)
        n = self.n_for_grid(delta, weights.mu1, weights.mu2)
        k = n + s
        return TruncationParams(-k, 1, k, -(n - 1), n - 1)

    # ------------------------------------------------------------------
    # Recipes
    # ------------------------------------------------------------------

    def _step1(self, t: int, delta: Real, op: LinearOp, spec: NormSpec) -> DeltaChain:
        weights = self._weights(op)
        m1 = self.m1_for(delta, weights.mu1)
        a = modulus(weights.mu1)
        f1 = SeqVector.basis(Line(t + m1 - 1), op.mode, reciprocal(weights.mu1) ** (m1 - 1))
        zero = SeqVector.zero(op.mode)
        vectors = self._checked(lambda: [zero, *self._orbit(op, f1, m1 - 1)], op, "Step 1")
        recipe = ChainRecipe(
            kind=self._kind(t, RecipeKind.STEP1),
            delta=delta,
            n=t,
            lengths={"m1": m1},
            window=self._step1_window(t, delta, weights, op.family),
            inequalities=self._minimal(
                f"1 < {delta} * {a}^{m1 - 1}", f"not 1 < {delta} * {a}^{m1 - 2}", m1
            ),
            direction=Direction.FROM_ZERO,
        )
        return self._finish(vectors, delta, op, spec, recipe)

    def _step2(self, s: int, delta: Real, op: LinearOp, spec: NormSpec) -> DeltaChain:
        if op.family is OpFamily.COMB_SHIFT:
            return self._step2_comb(s, delta, op, spec)
        return self._step2_grid(s, delta, op, spec)

    def _step2_comb(self, s: int, delta: Real, op: LinearOp, spec: NormSpec) -> DeltaChain:
        self._require_family(op, OpFamily.COMB_SHIFT)
        weights = self._weights(op)
        m2 = self.m2_for_comb(delta, weights.mu1, weights.mu2)
        k = m2 + s
        c = weights.mu1**m2 * reciprocal(weights.mu2) ** (m2 - 1)
        start = SeqVector.basis(Line(-s), op.mode)

        def build() -> list[SeqVector]:
            f1 = self.operator_service.apply(op, start) - SeqVector.basis(
                Branch(k, m2 - 1), op.mode, c
            )
            return [start, *self._orbit(op, f1, m2 - 1)]

        vectors = self._checked(build, op, "Step 2")
        recipe = ChainRecipe(
            kind=self._kind(-s, RecipeKind.STEP2_COMB),
            delta=delta,
            n=-s,
            lengths={"m2": m2, "branch": k},
            window=self._step2_window(s, delta, weights, op.family),
            inequalities=self._step2_inequalities(delta, weights, m2, "m2"),
            direction=Direction.TO_ZERO,
        )
        return self._finish(vectors, delta, op, spec, recipe)

    def _step2_grid(self, s: int, delta: Real, op: LinearOp, spec: NormSpec) -> DeltaChain:
        self._require_family(op, OpFamily.GRID_T)
        weights = self._weights(op)
        n = self.n_for_grid(delta, weights.mu1, weights.mu2)
        m2 = 2 * n - 1
        k = n + s
        c = weights.mu1**n * reciprocal(weights.mu2) ** (n - 1)
        start = SeqVector.basis(Line(-s), op.mode)

        def build() -> list[SeqVector]:
            f1 = self.operator_service.apply(op, start) - SeqVector.basis(
                Branch(k, n - 1), op.mode, c
            )
            return [start, *self._orbit(op, f1, m2 - 2), SeqVector.zero(op.mode)]

        vectors = self._checked(build, op, "Step 2")
        recipe = ChainRecipe(
            kind=self._kind(-s, RecipeKind.STEP2_GRID),
            delta=delta,
            n=-s,
            lengths={"n_branch": n, "m2": m2, "branch": k},
            window=self._step2_window(s, delta, weights, op.family),
            inequalities=self._step2_inequalities(delta, weights, n, "n"),
            direction=Direction.TO_ZERO,
        )
        return self._finish(vectors, delta, op, spec, recipe)

    # ------------------------------------------------------------------
    # Helpers
    # ------------------------------------------------------------------

    def _orbit(self, op: LinearOp, f1: SeqVector, steps: int) -> list[SeqVector]:
        """``[f1, T f1, ..., T^steps f1]``."""
        out = [f1]
        for step in range(1, steps + 1):
            out.append(self._chop(self.operator_service.apply(op, out[-1], step), step))
        return out

    def _chop(self, f: SeqVector, step: int) -> SeqVector:
        """Drop floating-point residue left by cancelling terms."""
        if f.mode is ScalarMode.EXACT or f.is_zero():
            return f
        scale = max(abs(x) for _, x in f.items())
        cutoff = self.config.float_slack * step * scale
        return SeqVector({v: x for v, x in f.items() if abs(x) > cutoff}, f.mode)

    def _checked(self, build, op: LinearOp, what: str):
        try:
            return build()
        except LeakageOutOfWindowError as e:
            raise TruncationError(f"{what} does not fit the window {op.tree.params}: {e}") from e

    def _finish(
        self,
        vectors: list[SeqVector],
        delta: Real,
        op: LinearOp,
        spec: NormSpec,
        recipe: ChainRecipe,
    ) -> DeltaChain:
        chain = DeltaChain(tuple(vectors), delta, op, spec, recipe)
        # The last link is only applied during validation, so check it fits now.
        self._checked(lambda: self.chain_service.to_perturbations(chain), op, recipe.kind.value)
        logger.debug(
            f"{recipe.kind.value} chain for e_{recipe.n} (delta={delta}): length {chain.length}"
        )
        return chain

    @staticmethod
    def _weights(op: LinearOp) -> WeightAssignment:
        if op.family not in _FAMILIES or op.descriptor is None:
            raise NotApplicableError(
                f"Line chains need the comb shift or the grid operator, got {op.family.value}"
            )
        return WeightAssignment.from_json(op.descriptor.params)

    @staticmethod
    def _require_family(op: LinearOp, family: OpFamily) -> None:
        if op.family is not family:
            raise NotApplicableError(f"Recipe needs {family.value}, got {op.family.value}")

    @staticmethod
    def _kind(n: int, base: RecipeKind) -> RecipeKind:
        if n < 0:
            return RecipeKind.SHIFTED_MINUS_N
        if n > 0:
            return RecipeKind.SHIFTED_PLUS_N
        return base

    @staticmethod
    def _minimal(holds: str, fails: str, m: int) -> tuple[str, ...]:
        return (holds, fails) if m > 2 else (holds,)

    def _step2_inequalities(
        self, delta: Real, weights: WeightAssignment, m: int, name: str
    ) -> tuple[str, ...]:
        a, b = modulus(weights.mu1), modulus(weights.mu2)
        return self._minimal(
            f"{name}={m}: {a}^{m} < {delta} * {b}^{m - 1}",
            f"not {a}^{m - 1} < {delta} * {b}^{m - 2}",
            m,
        )
