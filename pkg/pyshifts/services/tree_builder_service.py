"""Builders and validation for the line, comb and grid trees."""

import logging
from dataclasses import dataclass

from pyshifts.domain import Branch, DirectedTree, Line, TruncationParams, VertexId
from pyshifts.domain.errors import InvalidTreeError
from pyshifts.domain.vertex import vertex_key

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TreeViolation:
    """One breached tree axiom with the vertices that witness it."""

    axiom: str
    vertices: tuple[VertexId, ...]

    def __str__(self) -> str:
        return f"{self.axiom}: {', '.join(str(v) for v in self.vertices)}"

    def to_json(self) -> dict:
        return {"axiom": self.axiom, "vertices": [str(v) for v in self.vertices]}


class TreeBuilderService:
    """Builds finite windows of the vertex sets the shifts act on.

    All builders flag window-cut vertices so that operator application can
    detect when a computation would need a vertex the window dropped.
    """

    def build_line_tree(self, params: TruncationParams, rooted: bool = False) -> DirectedTree:
        """Build the line ``n_min..n_max`` with ``Chi(n) = {n+1}``.

        Args:
            params: Window; only ``n_min``/``n_max`` are used
            rooted: If True ``n_min`` is the root (the natural numbers case);
                otherwise ``n_min`` is flagged as cut below

        Returns:
            DirectedTree of kind ``"line"``
        """
        parents: dict[VertexId, VertexId | None] = {}
        for n in range(params.n_min, params.n_max + 1):
            parents[Line(n)] = Line(n - 1) if n > params.n_min else None
        cut_below = [] if rooted else [Line(params.n_min)]
        tree = DirectedTree.from_parents(
            parents,
            cut_below=cut_below,
            cut_above=[Line(params.n_max)],
            kind="rooted-line" if rooted else "line",
            params=params,
        )
        logger.debug(f"Built {tree}")
        return tree

    def build_comb_tree(self, params: TruncationParams) -> DirectedTree:
        """Build the line with a finite finger ``(-k,1)..(-k,k)`` at each ``-k``.

        Raises:
            InvalidTreeError: If ``k_max < 1``
        """
        if params.k_max < 1:
            raise InvalidTreeError("Comb tree needs k_max >= 1")
        parents: dict[VertexId, VertexId | None] = {}
        for n in range(params.n_min, params.n_max + 1):
            parents[Line(n)] = Line(n - 1) if n > params.n_min else None
        for k in range(1, params.k_max + 1):
            parents[Branch(k, 1)] = Line(-k)
            for j in range(2, k + 1):
                parents[Branch(k, j)] = Branch(k, j - 1)
        # Line vertices further left than -k_max lost their fingers to the window.
        fingerless = [Line(n) for n in range(params.n_min, -params.k_max)]
        tree = DirectedTree.from_parents(
            parents,
            cut_below=[Line(params.n_min)],
            cut_above=[Line(params.n_max), *fingerless],
            kind="comb",
            params=params,
        )
        logger.debug(f"Built {tree}")
        return tree

    def build_grid_tree(self, params: TruncationParams) -> DirectedTree:
        """Build the line plus a two-sided branch path at each ``-k``.

        Branch ``k`` hangs from its line anchor ``-k`` at ``(-k,1)``; the arm
        ``(-k,2)..(-k,j_max)`` climbs from there and the arm
        ``(-k,0)..(-k,j_min)`` descends from it.  Both arm tips are cut by the
        window.  ``k_max = 0`` gives the unrooted line.

        Raises:
            InvalidTreeError: If ``j_min < 0 < j_max`` fails while branches exist
        """
        if params.k_max == 0:
            return self.build_line_tree(params, rooted=False)
        if not params.j_min < 0 < params.j_max:
            raise InvalidTreeError(
                f"Grid tree needs j_min < 0 < j_max, got [{params.j_min}, {params.j_max}]"
            )
        parents: dict[VertexId, VertexId | None] = {}
        for n in range(params.n_min, params.n_max + 1):
            parents[Line(n)] = Line(n - 1) if n > params.n_min else None
        cut_below: list[VertexId] = [Line(params.n_min)]
        cut_above: list[VertexId] = [Line(params.n_max)]
        for k in range(1, params.k_max + 1):
            anchor = Line(-k)
            parents[Branch(k, 1)] = anchor if anchor in parents else None
            if anchor not in parents:
                cut_below.append(Branch(k, 1))
            for j in range(2, params.j_max + 1):
                parents[Branch(k, j)] = Branch(k, j - 1)
            for j in range(params.j_min, 1):
                parents[Branch(k, j)] = Branch(k, j + 1)
            cut_above.extend([Branch(k, params.j_min), Branch(k, params.j_max)])
        cut_above.extend(Line(n) for n in range(params.n_min, -params.k_max))
        tree = DirectedTree.from_parents(
            parents, cut_below=cut_below, cut_above=cut_above, kind="grid", params=params
        )
        logger.debug(f"Built {tree}")
        return tree

    def build(self, kind: str, params: TruncationParams) -> DirectedTree:
        """Dispatch on a tree kind name (``line``, ``rooted-line``, ``comb``, ``grid``)."""
        if kind == "line":
            return self.build_line_tree(params, rooted=False)
        if kind == "rooted-line":
            return self.build_line_tree(params, rooted=True)
        if kind == "comb":
            return self.build_comb_tree(params)
        if kind == "grid":
            return self.build_grid_tree(params)
        raise InvalidTreeError(f"Unknown tree kind {kind!r}")

    def validate(self, tree: DirectedTree) -> list[TreeViolation]:
        """Check the tree axioms.

        Returns:
            Empty list iff the parent/children maps agree, there is no directed
            cycle, at most one vertex is parentless without being cut, and the
            window is connected; a cut vertex only reaches its own neighbour
            outside the window.
        """
        violations: list[TreeViolation] = []
        violations.extend(self._check_consistency(tree))

        roots = [v for v in tree.parentless if v not in tree.cut_below]
        if len(roots) > 1:
            violations.append(TreeViolation("multiple roots", tuple(roots)))

        cycle = self._find_cycle(tree)
        if cycle:
            violations.append(TreeViolation("cycle", tuple(cycle)))

        components = self._components(tree)
        if len(components) > 1:
            witnesses = tuple(min(c, key=vertex_key) for c in components)
            violations.append(TreeViolation("disconnected", witnesses))

        for violation in violations:
            logger.debug(f"Tree violation in {tree.kind}: {violation}")
        return violations

    def require_valid(self, tree: DirectedTree) -> None:
        """Raise ``InvalidTreeError`` unless :meth:`validate` is clean."""
        violations = self.validate(tree)
        if violations:
            raise InvalidTreeError(
                f"Invalid {tree.kind} tree: " + "; ".join(str(v) for v in violations),
                violations,
            )

    @staticmethod
    def _check_consistency(tree: DirectedTree) -> list[TreeViolation]:
        out: list[TreeViolation] = []
        for v in tree.sorted_vertices():
            p = tree.parent.get(v)
            if p is None:
                continue
            if p not in tree.vertices:
                out.append(TreeViolation("parent outside vertex set", (v, p)))
            elif v not in tree.children_of(p):
                out.append(TreeViolation("parent-child consistency", (p, v)))
        for p in tree.sorted_vertices():
            for c in tree.children_of(p):
                if c not in tree.vertices or tree.parent.get(c) != p:
                    out.append(TreeViolation("parent-child consistency", (p, c)))
        return out

    @staticmethod
    def _find_cycle(tree: DirectedTree) -> list[VertexId]:
        state: dict[VertexId, int] = {}
        for start in tree.sorted_vertices():
            if start in state:
                continue
            path: list[VertexId] = []
            v: VertexId | None = start
            while v is not None and v in tree.vertices and v not in state:
                state[v] = 1
                path.append(v)
                v = tree.parent.get(v)
            if v is not None and state.get(v) == 1:
                return path[path.index(v) :]
            for u in path:
                state[u] = 2
        return []

    @staticmethod
    def _components(tree: DirectedTree) -> list[set[VertexId]]:
        link: dict[VertexId, VertexId] = {v: v for v in tree.vertices}
        # Out-of-window parents join the union as their own vertices.
        for p in tree.parent.values():
            if p is not None:
                link.setdefault(p, p)

        def find(v: VertexId) -> VertexId:
            while link[v] != v:
                link[v] = link[link[v]]
                v = link[v]
            return v

        def union(a: VertexId, b: VertexId) -> None:
            ra, rb = find(a), find(b)
            if ra != rb:
                link[ra] = rb

        for c, p in tree.parent.items():
            if p is not None and c in link:
                union(c, p)
        groups: dict[VertexId, set[VertexId]] = {}
        for v in tree.vertices:
            groups.setdefault(find(v), set()).add(v)
        return sorted(groups.values(), key=lambda g: vertex_key(min(g, key=vertex_key)))
