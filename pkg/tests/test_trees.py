"""Tests for tree windows and the tree axioms."""

import pytest

from pyshifts.domain import (
    Branch,
    DirectedTree,
    InvalidTreeError,
    Line,
    TruncationParams,
    tree_from_json,
)
from pyshifts.services import TreeBuilderService


def _axioms(tree: DirectedTree) -> set[str]:
    """Helper to collect the names of the violated axioms."""
    return {v.axiom for v in TreeBuilderService().validate(tree)}


class TestTruncationParams:
    """Test window parameter validation."""

    def test_empty_line_range(self) -> None:
        with pytest.raises(ValueError, match="Empty line range"):
            TruncationParams(3, 2)

    def test_branches_need_their_attachment_points(self) -> None:
        with pytest.raises(ValueError, match="attachment point"):
            TruncationParams(-2, 1, k_max=3)

    def test_covers(self) -> None:
        outer = TruncationParams(-6, 2, 6, -5, 5)
        assert outer.covers(TruncationParams(-3, 1, 3, -2, 2))
        assert not outer.covers(TruncationParams(-7, 1, 7))

    def test_json_form(self) -> None:
        params = TruncationParams(-4, 3, 4, -1, 2)
        assert TruncationParams.from_json(params.to_json()) == params


class TestLineTree:
    """Test the line windows."""

    def test_unrooted_line_is_cut_at_both_ends(self) -> None:
        tree = TreeBuilderService().build_line_tree(TruncationParams(-3, 3))
        assert len(tree) == 7
        assert tree.parent_of(Line(0)) == Line(-1)
        assert tree.children_of(Line(0)) == (Line(1),)
        assert tree.cut_below == frozenset({Line(-3)})
        assert tree.cut_above == frozenset({Line(3)})
        assert tree.root is None
        assert _axioms(tree) == set()

    def test_rooted_line_has_a_root(self) -> None:
        tree = TreeBuilderService().build_line_tree(TruncationParams(1, 5), rooted=True)
        assert tree.kind == "rooted-line"
        assert tree.root == Line(1)
        assert tree.leaves() == []


class TestCombTree:
    """Test the comb tree: the line with a finite finger at each negative vertex."""

    def test_fingers_hang_off_negative_vertices(self) -> None:
        tree = TreeBuilderService().build_comb_tree(TruncationParams(-3, 2, 3))
        assert len(tree) == 12
        assert tree.parent_of(Branch(2, 1)) == Line(-2)
        assert tree.parent_of(Branch(3, 3)) == Branch(3, 2)
        assert tree.branching_vertices() == [Line(-3), Line(-2), Line(-1)]
        assert tree.leaves() == [Branch(1, 1), Branch(2, 2), Branch(3, 3)]
        assert _axioms(tree) == set()

    def test_fingerless_vertices_are_cut_above(self) -> None:
        tree = TreeBuilderService().build_comb_tree(TruncationParams(-5, 1, 2))
        assert {Line(-5), Line(-4), Line(-3)} <= tree.cut_above
        assert Line(-2) not in tree.cut_above

    def test_ancestors_climb_to_the_line(self) -> None:
        tree = TreeBuilderService().build_comb_tree(TruncationParams(-5, 2, 3))
        assert tree.ancestors(Branch(3, 3), 4) == [Branch(3, 2), Branch(3, 1), Line(-3), Line(-4)]

    def test_comb_needs_a_finger(self) -> None:
        with pytest.raises(InvalidTreeError, match="k_max >= 1"):
            TreeBuilderService().build_comb_tree(TruncationParams(-2, 2))


class TestGridTree:
    """Test the grid windows: two-sided branch paths at each negative vertex."""

    def test_branches_hang_from_their_anchors(self) -> None:
        tree = TreeBuilderService().build_grid_tree(TruncationParams(-2, 1, 2, -2, 2))
        assert len(tree) == 4 + 2 * 5
        assert tree.parent_of(Branch(1, 1)) == Line(-1)
        assert tree.parent_of(Branch(1, 2)) == Branch(1, 1)
        assert tree.parent_of(Branch(1, -2)) == Branch(1, -1)
        assert tree.children_of(Branch(2, 1)) == (Branch(2, 0), Branch(2, 2))
        assert {Branch(1, -2), Branch(2, 2)} <= tree.cut_above
        assert tree.cut_below == frozenset({Line(-2)})
        assert _axioms(tree) == set()

    def test_branch_range_must_straddle_zero(self) -> None:
        with pytest.raises(InvalidTreeError, match="j_min < 0 < j_max"):
            TreeBuilderService().build_grid_tree(TruncationParams(-2, 1, 2, 0, 2))

    def test_no_branches_gives_the_line(self) -> None:
        tree = TreeBuilderService().build_grid_tree(TruncationParams(-2, 2))
        assert tree.kind == "line"

    def test_unknown_kind(self) -> None:
        with pytest.raises(InvalidTreeError, match="Unknown tree kind"):
            TreeBuilderService().build("star", TruncationParams(0, 1))


class TestTreeAxioms:
    """Test detection of broken trees."""

    def test_cycle_is_reported(self) -> None:
        tree = DirectedTree.from_parents({Line(0): Line(1), Line(1): Line(0), Line(2): Line(1)})
        assert "cycle" in _axioms(tree)

    def test_two_roots_are_reported(self) -> None:
        tree = DirectedTree.from_parents({Line(0): None, Line(5): None})
        assert {"multiple roots", "disconnected"} <= _axioms(tree)

    def test_cut_vertices_do_not_join_separate_pieces(self) -> None:
        tree = DirectedTree.from_parents(
            {Line(0): None, Line(1): Line(0), Line(5): None, Line(6): Line(5)},
            cut_below=[Line(0), Line(5)],
            cut_above=[Line(1), Line(6)],
        )
        assert _axioms(tree) == {"disconnected"}

    def test_shared_outside_parent_connects(self) -> None:
        tree = DirectedTree.from_parents({Line(1): Line(0), Branch(1, 1): Line(0)})
        assert "disconnected" not in _axioms(tree)

    def test_parent_outside_the_vertex_set(self) -> None:
        tree = DirectedTree.from_parents({Line(0): Line(9)})
        assert "parent outside vertex set" in _axioms(tree)

    def test_require_valid_carries_the_violations(self) -> None:
        tree = DirectedTree.from_parents({Line(0): None, Line(5): None})
        with pytest.raises(InvalidTreeError, match="multiple roots") as exc:
            TreeBuilderService().require_valid(tree)
        assert exc.value.violations


class TestTreeSerialisation:
    """Test the JSON form of trees."""

    def test_grid_tree_survives_json(self) -> None:
        tree = TreeBuilderService().build_grid_tree(TruncationParams(-2, 1, 2, -1, 1))
        rebuilt = tree_from_json(tree.to_json())
        assert rebuilt.vertices == tree.vertices
        assert rebuilt.parent == tree.parent
        assert rebuilt.cut_below == tree.cut_below
        assert rebuilt.cut_above == tree.cut_above
        assert rebuilt.params == tree.params

    def test_json_flags(self) -> None:
        tree = TreeBuilderService().build_line_tree(TruncationParams(1, 3), rooted=True)
        doc = tree.to_json()
        assert doc["flags"]["root"] == "1"
        assert doc["edges"] == [["1", "2"], ["2", "3"]]
