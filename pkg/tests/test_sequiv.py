"""
Tests for Jordan-Hölder filtrations, graded pieces and S-equivalence
"""
import pytest

from src.abel import abel0, abel1, point_classes
from src.curve import Node, Smooth
from src.errors import SEquivalenceError
from src.sequiv import (
    all_jh_filtrations,
    chain_parts,
    collapse_analysis,
    degree_one_violation,
    jh_filtration,
    s_equivalent,
    s_invariants,
    zero_margin_subcurves,
)
from src.sheaf import line_bundle, total_degree
from src.stability import StabilityContext
from src.structure import small_tails


@pytest.fixture
def remark_ctx(fix_a):
    return StabilityContext(fix_a, 0, "X1")


def _block_index(report, q):
    return next(i for i, block in enumerate(report.blocks) if q in block)


class TestFiltration:
    """Maximal chains of zero-margin subcurves"""

    def test_remark_chain(self, fix_a, remark_ctx):
        sheaf = abel0(fix_a, "P", Smooth("X2", "Q"))
        assert jh_filtration(sheaf, remark_ctx) == [frozenset({"X2", "X4"})]

    def test_stable_sheaf_has_empty_chain(self, fix_a, remark_ctx):
        sheaf = abel0(fix_a, "P", Smooth("X3", "M"))
        assert zero_margin_subcurves(sheaf, remark_ctx) == []
        assert jh_filtration(sheaf, remark_ctx) == []

    def test_all_chains(self, fix_a, remark_ctx):
        sheaf = abel0(fix_a, "P", Smooth("X2", "Q"))
        assert all_jh_filtrations(sheaf, remark_ctx) == [[frozenset({"X2", "X4"})]]

    def test_exhaustive_search_cap(self, fix_a, remark_ctx):
        sheaf = abel0(fix_a, "P", Smooth("X2", "Q"))
        with pytest.raises(SEquivalenceError, match="limited to 2 vertices"):
            all_jh_filtrations(sheaf, remark_ctx, max_vertices=2)

    def test_unstable_rejected(self, fix_b):
        sheaf = line_bundle(fix_b, {"Q": 2})
        with pytest.raises(SEquivalenceError, match="not semistable"):
            jh_filtration(sheaf, StabilityContext(fix_b, 2))

    def test_chain_parts(self, fix_a):
        parts = chain_parts(fix_a, [frozenset({"X2", "X4"})])
        assert parts == [frozenset({"X2", "X4"}), frozenset({"X1", "X3"})]


class TestGradedPieces:
    """Parts and graded sheaves"""

    def test_remark_pieces(self, fix_a, remark_ctx):
        """
        Test Gr of the remark example

        The first part keeps -Q; the second is twisted down at the two
        branches of X1 meeting X2.
        """
        sheaf = abel0(fix_a, "P", Smooth("X2", "Q"))
        sclass = s_invariants(sheaf, remark_ctx)
        first = sclass.piece(frozenset({"X2", "X4"}))
        second = sclass.piece(frozenset({"X1", "X3"}))

        assert first.coefficient("Q") == -1
        assert total_degree(first) == -1
        assert second.coefficient("P") == 1
        assert second.coefficient("e1@X1") == -1
        assert second.coefficient("e2@X1") == -1

    def test_missing_piece(self, fix_a, remark_ctx):
        sclass = s_invariants(abel0(fix_a, "P", Smooth("X2", "Q")), remark_ctx)
        with pytest.raises(SEquivalenceError, match="no graded piece"):
            sclass.piece(frozenset({"X1"}))


class TestSEquivalence:
    """Comparison of S-classes"""

    def test_points_on_x2_s_equivalent(self, fix_a, remark_ctx):
        """Q and Q2 give non-isomorphic sheaves with the same graded sheaf"""
        a = abel0(fix_a, "P", Smooth("X2", "Q"))
        b = abel0(fix_a, "P", Smooth("X2", "Q2"))
        assert s_equivalent(a, b, remark_ctx) is True

    def test_stable_against_strictly_semistable(self, fix_a, remark_ctx):
        a = abel0(fix_a, "P", Smooth("X2", "Q"))
        b = abel0(fix_a, "P", Smooth("X3", "M"))
        assert s_equivalent(a, b, remark_ctx) is False

    def test_splitting_choice_s_equivalent(self, fix_b):
        """Both choices at the splitting node give S-equivalent sheaves"""
        ctx = StabilityContext(fix_b, 1)
        a = abel1(fix_b, small_tails(fix_b, {"e": "v1"}), Node("e"))
        b = abel1(fix_b, small_tails(fix_b, {"e": "v2"}), Node("e"))
        assert s_equivalent(a, b, ctx) is True


class TestCollapse:
    """S-equivalence on the fibers of the Abel maps"""

    def test_degree_zero_merges(self, fix_a):
        report = collapse_analysis(fix_a, 0, base="P")
        i = _block_index(report, Smooth("X2", "Q"))
        j = _block_index(report, Smooth("X2", "Q2"))
        assert (min(i, j), max(i, j)) in report.merges
        assert any(i in c and j in c for c in report.classes)
        assert report.ok

    def test_degree_zero_keeps_elliptic_points_apart(self, fix_a):
        report = collapse_analysis(fix_a, 0, base="P")
        i = _block_index(report, Smooth("X2", "Q"))
        k = _block_index(report, Smooth("X4", "X4#generic"))
        assert not any(i in c and k in c for c in report.classes)

    def test_degree_one_split_curve(self, fix_b):
        report = collapse_analysis(fix_b, 1)
        assert report.ok
        assert report.merges == []

    def test_degree_one_fix_a(self, fix_a):
        assert collapse_analysis(fix_a, 1).ok

    def test_degree_one_needs_gstable(self, fix_c):
        with pytest.raises(SEquivalenceError, match="G-stable"):
            collapse_analysis(fix_c, 1)

    def test_other_degrees(self, fix_a):
        with pytest.raises(SEquivalenceError, match="degrees 0 and 1"):
            collapse_analysis(fix_a, 2)

    def test_cache_shared(self, fix_a, report_cache):
        collapse_analysis(fix_a, 0, base="P", cache=report_cache)
        assert len(report_cache) > 0


class TestDegreeOneBehaviour:
    """Per-point splitting-node behaviour of the degree-1 Abel sheaves"""

    @pytest.mark.parametrize("side", ["v1", "v2"])
    def test_every_point_has_small_tail_chain(self, fix_b, side):
        """
        Test every point class of FIX-B under both choices at e

        Each I^1_Q is strictly semistable with Jordan-Hölder chain the
        chosen small tail, not only the fiber representatives.
        """
        table = small_tails(fix_b, {"e": side})
        ctx = StabilityContext(fix_b, 1, "v1" if side == "v2" else "v2")
        for q in point_classes(fix_b):
            sheaf = abel1(fix_b, table, q)
            assert degree_one_violation(fix_b, table, q, sheaf, ctx) is None
            assert jh_filtration(sheaf, ctx) == [frozenset({side})]

    def test_wrong_chain_reported(self, fix_b):
        """
        Test a degree-1 sheaf whose chain is the other side of e

        O(Q) with Q on v2 has margin 0 on {v1}, while the chosen tail is {v2}.
        """
        table = small_tails(fix_b, {"e": "v2"})
        ctx = StabilityContext(fix_b, 1)
        sheaf = line_bundle(fix_b, {"Q": 1})
        detail = degree_one_violation(fix_b, table, Smooth("v2", "Q"), sheaf, ctx)
        assert detail is not None
        assert "JH chain" in detail

    def test_stable_without_splitting_node(self, fix_a):
        table = small_tails(fix_a)
        ctx = StabilityContext(fix_a, 1)
        for q in point_classes(fix_a):
            assert degree_one_violation(fix_a, table, q, abel1(fix_a, table, q), ctx) is None

    def test_unstable_without_splitting_node_reported(self, fix_a):
        """
        Test an unstable degree-1 sheaf on FIX-A

        Degree -2 on X1 gives margin -2 - 1/4 + 3/2 < 0 on {X1}.
        """
        table = small_tails(fix_a)
        ctx = StabilityContext(fix_a, 1)
        sheaf = line_bundle(fix_a, {"M": 3, "P": -2})
        detail = degree_one_violation(fix_a, table, Smooth("X3", "M"), sheaf, ctx)
        assert detail == "degree-1 sheaf at M is not stable without a splitting node"
