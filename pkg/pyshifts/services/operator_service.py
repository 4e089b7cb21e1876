"""Construction and application of the shift operators."""

import logging
import math
from collections.abc import Iterable, Mapping
from fractions import Fraction

from pyshifts.config import VerificationConfig, build_default_config
from pyshifts.domain import (
    Branch,
    ClassicalWeights,
    ClauseStatus,
    DirectedTree,
    LeakageOutOfWindowError,
    Line,
    LinearOp,
    Lp,
    MissingWeightError,
    NormSpec,
    NotApplicableError,
    OperatorDescriptor,
    OpFamily,
    ProductSeminorms,
    Scalar,
    ScalarMode,
    ScalarModeError,
    SeqVector,
    Sup,
    TruncationParams,
    VertexId,
    WeightAssignment,
    WeightConditionError,
)
from pyshifts.domain.errors import InvalidNormSpecError
from pyshifts.domain.linear_op import Column
from pyshifts.domain.scalars import Real, modulus, reciprocal, scalar_to_json, to_scalar
from pyshifts.domain.vertex import vertex_key

from .tree_builder_service import TreeBuilderService

logger = logging.getLogger(__name__)

Weights = WeightAssignment | ClassicalWeights | Mapping[VertexId, Scalar]


class OperatorService:
    """Builds weighted backward shifts and the invertible grid pair, and applies them.

    Operators are stored column by column (the image of every basis vector in
    the window).  Sources whose true image leaves the window are recorded as
    leaks; applying an operator to a vector that is non-zero on a leak raises
    :class:`LeakageOutOfWindowError` instead of returning a silently
    truncated result.
    """

    def __init__(
        self,
        config: VerificationConfig | None = None,
        tree_builder: TreeBuilderService | None = None,
    ):
        """Initialize service with dependencies.

        Args:
            config: Verification tolerances (float slack for norm checks)
            tree_builder: Builder used for classical windows and tree validation
        """
        self.config = config or build_default_config()
        self.tree_builder = tree_builder or TreeBuilderService()

    # ------------------------------------------------------------------
    # Builders
    # ------------------------------------------------------------------

    def shift_from_weights(
        self, tree: DirectedTree, weights: Weights, mode: ScalarMode = ScalarMode.EXACT
    ) -> LinearOp:
        """Build the weighted backward shift ``e_u -> lambda_u e_par(u)`` on ``tree``.

        Args:
            tree: Valid window of a directed tree
            weights: Comb weights, classical weights or an explicit vertex map
            mode: Scalar mode for an explicit vertex map (the other weight
                types carry their own)

        Returns:
            LinearOp; the root column is empty and cut-below sources leak

        Raises:
            InvalidTreeError: If the tree breaks an axiom
            MissingWeightError: If a non-root vertex has no weight
        """
        self.tree_builder.require_valid(tree)
        family, mode, weight_of = self._weight_lookup(weights, mode)

        columns: dict[VertexId, Column] = {}
        leaks: set[VertexId] = set()
        for u in tree.sorted_vertices():
            p = tree.parent_of(u)
            if p is None:
                if u in tree.cut_below:
                    leaks.add(u)
                continue
            weight = to_scalar(weight_of(u), mode)
            columns[u] = ((p, weight),) if weight != 0 else ()

        descriptor = OperatorDescriptor(family, self._describe(weights), tree.params)
        op = LinearOp(columns, family, tree, mode, frozenset(leaks), descriptor)
        logger.debug(f"Built {op} ({len(leaks)} leaking sources)")
        return op

    def build_comb_shift(self, weights: WeightAssignment, params: TruncationParams) -> LinearOp:
        """Build the comb tree for ``params`` and the shift with weights ``mu1``/``mu2``."""
        return self.shift_from_weights(self.tree_builder.build_comb_tree(params), weights)

    def build_classical_shift(
        self, weights: ClassicalWeights, params: TruncationParams
    ) -> LinearOp:
        """Build the classical unilateral or bilateral weighted backward shift.

        A unilateral shift lives on ``1..n_max`` with root ``1``.

        Raises:
            ValueError: If a unilateral window does not start at 1
        """
        rooted = weights.kind == "unilateral"
        if rooted and params.n_min != 1:
            raise ValueError(f"Unilateral window must start at 1, got n_min={params.n_min}")
        tree = self.tree_builder.build_line_tree(
            TruncationParams(params.n_min, params.n_max), rooted=rooted
        )
        return self.shift_from_weights(tree, weights)

    def build_grid_T(self, tree: DirectedTree, weights: WeightAssignment) -> LinearOp:
        """Build the invertible operator ``T`` on a grid window.

        ``e_n -> mu1 e_(n-1)``, ``e_(-k,j) -> lambda_(-k,j) e_(-k,j-1)`` for
        ``j != 1`` and ``e_(-k,1) -> mu2 (e_(-k,0) + e_-k)``.

        Raises:
            WeightConditionError: If the weight matrix fails boundedness or
                both summability clauses for some branch in the window
        """
        params = self._grid_params(tree)
        self.check_grid_conditions(weights, params.k_max)
        grid = weights.grid_weights
        mode = weights.mode

        columns: dict[VertexId, Column] = {}
        leaks: set[VertexId] = set()
        for u in tree.sorted_vertices():
            if isinstance(u, Line):
                target: VertexId = Line(u.n - 1)
                if target not in tree:
                    leaks.add(u)
                    continue
                columns[u] = ((target, weights.mu1),)
            elif u.j == 1:
                columns[u] = ((Branch(u.k, 0), weights.mu2), (u.anchor, weights.mu2))
            else:
                target = Branch(u.k, u.j - 1)
                if target not in tree:
                    leaks.add(u)
                    continue
                columns[u] = ((target, to_scalar(grid.weight(u.k, u.j), mode)),)

        descriptor = OperatorDescriptor(OpFamily.GRID_T, self._describe(weights), params)
        return LinearOp(columns, OpFamily.GRID_T, tree, mode, frozenset(leaks), descriptor)

    def build_grid_T_inverse(self, tree: DirectedTree, weights: WeightAssignment) -> LinearOp:
        """Build ``T^-1`` on a grid window.

        ``e_n -> e_(n+1)/mu1``, ``e_(-k,j) -> e_(-k,j+1)/lambda_(-k,j+1)`` for
        ``j != 0`` and ``e_(-k,0) -> e_(-k,1)/mu2 - e_(-k+1)/mu1``.
        """
        params = self._grid_params(tree)
        self.check_grid_conditions(weights, params.k_max)
        grid = weights.grid_weights
        mode = weights.mode
        inv_mu1 = reciprocal(weights.mu1)

        columns: dict[VertexId, Column] = {}
        leaks: set[VertexId] = set()
        for u in tree.sorted_vertices():
            if isinstance(u, Line):
                target: VertexId = Line(u.n + 1)
                if target not in tree:
                    leaks.add(u)
                    continue
                columns[u] = ((target, inv_mu1),)
            elif u.j == 0:
                columns[u] = (
                    (Branch(u.k, 1), reciprocal(weights.mu2)),
                    (Line(-u.k + 1), -inv_mu1),
                )
            else:
                target = Branch(u.k, u.j + 1)
                if target not in tree:
                    leaks.add(u)
                    continue
                weight = to_scalar(grid.weight(u.k, u.j + 1), mode)
                columns[u] = ((target, reciprocal(weight)),)

        descriptor = OperatorDescriptor(
            OpFamily.GRID_T_INVERSE, self._describe(weights), params
        )
        return LinearOp(columns, OpFamily.GRID_T_INVERSE, tree, mode, frozenset(leaks), descriptor)

    def build_for_family(
        self, family: OpFamily, weights: Weights, params: TruncationParams
    ) -> LinearOp:
        """Build the window tree for ``family`` and the operator on it."""
        if family is OpFamily.COMB_SHIFT:
            return self.build_comb_shift(weights, params)
        if family is OpFamily.GRID_T:
            return self.build_grid_T(self.tree_builder.build_grid_tree(params), weights)
        if family is OpFamily.GRID_T_INVERSE:
            return self.build_grid_T_inverse(self.tree_builder.build_grid_tree(params), weights)
        if family is OpFamily.CLASSICAL_SHIFT:
            return self.build_classical_shift(weights, params)
        raise ValueError(f"No builder for operator family {family.value}")

    def check_grid_conditions(self, weights: WeightAssignment, k_max: int) -> None:
        """Check boundedness and, row by row, that one summability clause holds.

        Undeclared tails cannot be decided and only produce a warning.

        Raises:
            WeightConditionError: With the failing row and clause
        """
        grid = weights.grid_weights
        if any(x == 0 for x in grid.overrides.values()):
            raise WeightConditionError("Grid weights must be non-zero", clause="bounded")
        bounds = grid.bounds()
        if bounds is None:
            logger.warning(f"Grid weights '{grid.name}': undeclared tail, bounds not decidable")
        elif bounds[0] == 0:
            raise WeightConditionError(
                f"Grid weights '{grid.name}' have infimum 0", clause="bounded"
            )

        for k in range(1, k_max + 1):
            above, below = grid.clause_status(k)
            if above is ClauseStatus.FAILS and below is ClauseStatus.FAILS:
                raise WeightConditionError(
                    f"Row k={k} of grid weights '{grid.name}' fails both summability clauses",
                    k=k,
                    clause="both",
                )
            if ClauseStatus.HOLDS not in (above, below):
                logger.warning(
                    f"Row k={k} of grid weights '{grid.name}': summability inconclusive "
                    f"(above={above.value}, below={below.value})"
                )

    # ------------------------------------------------------------------
    # Application
    # ------------------------------------------------------------------

    def apply(self, op: LinearOp, f: SeqVector, step: int | None = None) -> SeqVector:
        """Linear extension of the columns of ``op`` to ``f``.

        Args:
            op: Operator
            f: Vector supported inside the window of ``op``
            step: Step index reported by a leakage error (used by powers)

        Raises:
            LeakageOutOfWindowError: If ``f`` is non-zero outside the window
                or on a source whose image leaves it
            ScalarModeError: If ``f`` and ``op`` use different scalar modes
        """
        if f.mode is not op.mode:
            raise ScalarModeError(
                f"Cannot apply a {op.mode.value} operator to a {f.mode.value} vector"
            )
        out: dict[VertexId, Scalar] = {}
        for u, x in f.items():
            if u not in op.vertices or u in op.leaks:
                raise LeakageOutOfWindowError(u, step)
            for target, coeff in op.column(u):
                out[target] = out.get(target, 0) + coeff * x
        return SeqVector(out, op.mode)

    def apply_power(self, op: LinearOp, f: SeqVector, n: int) -> SeqVector:
        """``op^n f``; leakage errors carry the 1-based step at which they occur."""
        if n < 0:
            raise ValueError(f"Power must be non-negative, got {n}")
        result = f
        for step in range(1, n + 1):
            result = self.apply(op, result, step)
        return result

    def compose(self, a: LinearOp, b: LinearOp) -> LinearOp:
        """Column-wise composition ``a o b`` on a shared window.

        A source leaks from the composition when it leaks from ``b`` or when
        its image under ``b`` touches a leak of ``a``.
        """
        if a.vertices != b.vertices:
            raise ValueError("Operators act on different windows")
        if a.mode is not b.mode:
            raise ScalarModeError("Cannot compose operators in different scalar modes")
        columns: dict[VertexId, Column] = {}
        leaks: set[VertexId] = set(b.leaks)
        for u in sorted(a.vertices, key=vertex_key):
            if u in b.leaks:
                continue
            image = SeqVector(dict(b.column(u)), b.mode)
            try:
                columns[u] = tuple(self.apply(a, image).items())
            except LeakageOutOfWindowError:
                leaks.add(u)
        descriptor = OperatorDescriptor(
            OpFamily.CUSTOM, {"composition": [a.family.value, b.family.value]}, a.tree.params
        )
        return LinearOp(columns, OpFamily.CUSTOM, a.tree, a.mode, frozenset(leaks), descriptor)

    def identity_defects(
        self, a: LinearOp, b: LinearOp, vertices: Iterable[VertexId] | None = None
    ) -> dict[VertexId, SeqVector]:
        """Basis vectors ``e_v`` with ``a(b(e_v)) != e_v``, mapped to the residual.

        Args:
            vertices: Sources to check; by default every source of the window
                whose composition stays inside it
        """
        composed = self.compose(a, b)
        if vertices is None:
            vertices = [v for v in composed.vertices if v not in composed.leaks]
        defects: dict[VertexId, SeqVector] = {}
        for v in sorted(vertices, key=vertex_key):
            e_v = SeqVector.basis(v, a.mode)
            residual = self.apply(composed, e_v) - e_v
            if not residual.is_zero():
                defects[v] = residual
        if defects:
            logger.error(
                f"{a.family.value} o {b.family.value} is not the identity on "
                f"{len(defects)} basis vectors"
            )
        return defects

    # ------------------------------------------------------------------
    # Structure
    # ------------------------------------------------------------------

    def norm_bound(self, op: LinearOp, spec: NormSpec) -> Real:
        """Operator-norm bound on the window.

        Maximum absolute column sum ``C`` for l^1, maximum absolute row sum ``R``
        for the sup norm and ``C^(1/p) R^(1-1/p)`` for l^p.  Float results are
        rounded up.

        Raises:
            InvalidNormSpecError: For product seminorms, which have no operator norm
        """
        if isinstance(spec, ProductSeminorms):
            raise InvalidNormSpecError("Product seminorms have no operator norm")
        zero: Real = Fraction(0) if op.mode is ScalarMode.EXACT else 0.0
        col_max = max(
            (sum((modulus(c) for _, c in col), zero) for col in op.columns.values()),
            default=zero,
        )
        row_max = max(
            (sum((modulus(c) for _, c in row), zero) for row in op.rows.values()),
            default=zero,
        )
        if isinstance(spec, Sup):
            return row_max
        if isinstance(spec, Lp) and spec.p == 1:
            return col_max
        if col_max == row_max:
            return col_max
        p = float(spec.p)
        bound = float(col_max) ** (1 / p) * float(row_max) ** (1 - 1 / p)
        return math.nextafter(bound, math.inf)

    def kernel_witness(self, op: LinearOp, v: VertexId) -> SeqVector:
        """``e_u/lambda_u - e_w/lambda_w`` for two sources feeding only ``v``.

        Raises:
            NotApplicableError: If fewer than two single-target sources hit ``v``
        """
        feeders = [
            (u, c) for u, c in op.contributors(v) if len(op.column(u)) == 1 and c != 0
        ]
        if len(feeders) < 2:
            raise NotApplicableError(f"{v} has fewer than two children in {op.family.value}")
        (u, lam_u), (w, lam_w) = feeders[:2]
        return SeqVector({u: reciprocal(lam_u), w: -reciprocal(lam_w)}, op.mode)

    def missing_preimages(self, op: LinearOp) -> list[VertexId]:
        """Window vertices no column reaches, excluding those cut above.

        ``e_v`` for such ``v`` is outside the range of the operator.
        """
        return [
            v
            for v in op.tree.sorted_vertices()
            if not op.contributors(v) and v not in op.tree.cut_above
        ]

    def restrict_to_line(self, op: LinearOp) -> LinearOp:
        """The line block of ``op``: line columns restricted to line targets."""
        lines = [v for v in op.tree.sorted_vertices() if isinstance(v, Line)]
        if not lines:
            raise NotApplicableError(f"{op} has no line vertices")
        params = TruncationParams(lines[0].n, lines[-1].n)
        tree = self.tree_builder.build_line_tree(params, rooted=False)
        columns: dict[VertexId, Column] = {
            u: tuple((t, c) for t, c in op.column(u) if isinstance(t, Line))
            for u in lines
            if u not in op.leaks
        }
        leaks = frozenset(u for u in lines if u in op.leaks)
        descriptor = OperatorDescriptor(
            OpFamily.CUSTOM, {"restriction_of": op.family.value}, params
        )
        return LinearOp(columns, OpFamily.CUSTOM, tree, op.mode, leaks, descriptor)

    # ------------------------------------------------------------------
    # Helpers
    # ------------------------------------------------------------------

    @staticmethod
    def _grid_params(tree: DirectedTree) -> TruncationParams:
        if tree.kind not in ("grid", "line") or tree.params is None:
            raise ValueError(f"Grid operators need a grid window, got {tree.kind}")
        return tree.params

    @staticmethod
    def _weight_lookup(weights: Weights, mode: ScalarMode):
        if isinstance(weights, WeightAssignment):
            return OpFamily.COMB_SHIFT, weights.mode, weights.comb_weight
        if isinstance(weights, ClassicalWeights):

            def classical(u: VertexId) -> Scalar:
                if not isinstance(u, Line):
                    raise MissingWeightError(f"Classical weights have no entry for {u}")
                return weights.weight(u.n)

            return OpFamily.CLASSICAL_SHIFT, weights.mode, classical

        def explicit(u: VertexId) -> Scalar:
            if u not in weights:
                raise MissingWeightError(f"No weight for non-root vertex {u}")
            return weights[u]

        return OpFamily.CUSTOM, mode, explicit

    @staticmethod
    def _describe(weights: Weights) -> dict:
        if isinstance(weights, (WeightAssignment, ClassicalWeights)):
            return weights.to_json()
        ordered = sorted(weights.items(), key=lambda item: vertex_key(item[0]))
        return {"weights": {str(v): scalar_to_json(x) for v, x in ordered}}
