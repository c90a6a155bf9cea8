"""
Tests for the dual-graph curve model

Genus, delta, dualizing degree, G-stability and subcurve enumeration.
"""
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import numpy as np

from src.curve import (
    Branch,
    Curve,
    Node,
    Smooth,
    Vertex,
    chi_structure,
    delta,
    genus_of,
    is_gstable,
    make_curve,
    omega_degree,
    proper_subcurves,
)
from src.errors import CurveError
from src.generator import random_curve
from src.structure import separating_lines


class TestConstruction:
    """Validation in the constructors"""

    def test_no_vertices(self):
        """An empty vertex list is rejected"""
        with pytest.raises(CurveError, match="no vertices"):
            Curve(())

    def test_duplicate_vertex(self):
        with pytest.raises(CurveError, match="duplicate vertex id 'a'"):
            make_curve([("a", 0), ("a", 1)])

    def test_unknown_endpoint(self):
        with pytest.raises(CurveError, match="unknown vertex 'c'"):
            make_curve([("a", 0), ("b", 0)], [("e", "a", "c")])

    def test_disconnected_rejected(self):
        """
        Test that make_curve requires a connected graph
        """
        with pytest.raises(CurveError, match="not connected"):
            make_curve([("a", 1), ("b", 1)])

    def test_negative_genus(self):
        with pytest.raises(CurveError, match="negative genus"):
            make_curve([("a", -1)])

    def test_loops_and_parallel_edges_allowed(self):
        """Loops and multi-edges are ordinary nodes"""
        curve = make_curve([("a", 0), ("b", 0)], [("l", "a", "a"), ("e1", "a", "b"), ("e2", "a", "b")])

        assert genus_of(curve) == 2
        assert curve.valence("a") == 4
        assert curve.branches("l") == (Branch("l", "a", 0), Branch("l", "a", 1))


class TestGenus:
    """Arithmetic genus of curves and subcurves"""

    def test_single_component(self, fix_d):
        """FIX-D: one genus-2 vertex"""
        assert genus_of(fix_d) == 2

    def test_fix_a(self, fix_a):
        """
        Test FIX-A genus

        0 + 0 + 1 + 1 plus four edges minus four vertices plus one.
        """
        assert genus_of(fix_a) == 3

    def test_subcurve(self, fix_a):
        """FIX-A, {X2, X4}: 0 + 1 + one internal edge - 2 + 1"""
        assert genus_of(fix_a, {"X2", "X4"}) == 1

    def test_disconnected_subcurve_uses_euler_characteristic(self, fix_a):
        """
        Test a disconnected subcurve

        g_Y = 1 - chi(O_Y): two elliptic components give genus 1.
        """
        assert chi_structure(fix_a, {"X3", "X4"}) == 0
        assert genus_of(fix_a, {"X3", "X4"}) == 1


class TestDelta:
    """Nodes between a subcurve and its complement"""

    def test_fix_a(self, fix_a):
        assert delta(fix_a, {"X2", "X4"}) == 2

    def test_fix_e(self, fix_e):
        """All three parallel edges cross"""
        assert delta(fix_e, {"b1"}) == 3

    def test_fix_b(self, fix_b):
        assert delta(fix_b, {"v1"}) == 1

    def test_full_curve_rejected(self, fix_b):
        """delta is defined on proper subcurves only"""
        with pytest.raises(CurveError, match="proper"):
            delta(fix_b, {"v1", "v2"})


class TestOmegaDegree:
    """Degree of the dualizing sheaf"""

    def test_fix_b(self, fix_b):
        """2*1 - 2 + 1"""
        assert omega_degree(fix_b, {"v1"}) == 1

    def test_fix_e(self, fix_e):
        """-2 + 3"""
        assert omega_degree(fix_e, {"b1"}) == 1

    def test_whole_curve(self, fix_a):
        assert omega_degree(fix_a) == 2 * 3 - 2

    @settings(max_examples=40, deadline=None)
    @given(st.integers(min_value=0, max_value=10_000))
    def test_singletons_sum_to_canonical_degree(self, seed):
        """
        Test additivity over components

        Sum of omega_degree({v}) over vertices is 2g - 2 for every curve;
        a loop contributes to its vertex through its internal edge.
        """
        curve = random_curve(np.random.default_rng(seed))
        if len(curve.vertices) == 1:
            return
        total = sum(omega_degree(curve, {v}) for v in curve.vertex_ids)
        assert total == 2 * genus_of(curve) - 2

    @settings(max_examples=40, deadline=None)
    @given(st.integers(min_value=0, max_value=10_000))
    def test_euler_identity(self, seed):
        """omega_Y = 2 g_Y - 2 + delta_Y and g_Y = 1 - chi(O_Y) on every proper subcurve"""
        curve = random_curve(np.random.default_rng(seed), max_vertices=5)
        for sub in proper_subcurves(curve):
            assert omega_degree(curve, sub) == 2 * genus_of(curve, sub) - 2 + delta(curve, sub)
            assert genus_of(curve, sub) == 1 - chi_structure(curve, sub)


class TestGStability:
    """Ampleness form of G-stability"""

    def test_fix_a(self, fix_a):
        assert is_gstable(fix_a)

    def test_fix_c(self, fix_c):
        """The middle line has valence 2"""
        assert not is_gstable(fix_c)

    def test_fix_e(self, fix_e):
        assert is_gstable(fix_e)

    def test_genus_one(self):
        """Genus below 2 is never G-stable"""
        assert not is_gstable(make_curve([("a", 1)]))

    @settings(max_examples=40, deadline=None)
    @given(st.integers(min_value=0, max_value=10_000))
    def test_genus_zero_iff_all_separating_lines(self, seed):
        """
        Test the genus-zero characterisation

        g = 0 exactly when every component is a separating line.
        """
        curve = random_curve(np.random.default_rng(seed), max_genus=1)
        all_lines = separating_lines(curve) == curve.full
        assert (genus_of(curve) == 0) == all_lines


class TestSubcurves:
    """Enumeration and restriction of subcurves"""

    def test_enumeration_order(self, fix_b):
        """Increasing size, vertex order within a size; the full curve is excluded"""
        assert list(proper_subcurves(fix_b)) == [frozenset({"v1"}), frozenset({"v2"})]

    def test_count(self, fix_a):
        assert len(list(proper_subcurves(fix_a))) == 2 ** 4 - 2

    def test_connected_only(self, fix_a):
        """{X3, X4} is disconnected"""
        connected = list(proper_subcurves(fix_a, connected_only=True))
        assert frozenset({"X3", "X4"}) not in connected
        assert frozenset({"X1", "X2"}) in connected

    def test_vertex_cap(self):
        """Enumeration beyond the cap is refused"""
        vertices = [Vertex(f"v{i}") for i in range(4)]
        edges = [(f"e{i}", f"v{i}", f"v{i + 1}") for i in range(3)]
        curve = make_curve(vertices, edges)
        with pytest.raises(CurveError, match="enumeration cap"):
            list(proper_subcurves(curve, cap=3))

    def test_restricted_piece(self, fix_a):
        """
        Test the piece curve of a subcurve

        Crossing nodes become labeled points on their inside endpoint.
        """
        piece = fix_a.restricted({"X1", "X3"})

        assert piece.vertex_ids == ("X1", "X3")
        assert [e.id for e in piece.edges] == ["e3"]
        assert piece.point_vertex("e1@X1") == "X1"
        assert piece.point_vertex("e2@X1") == "X1"
        assert piece.has_point("P") and piece.has_point("M")
        assert not piece.has_point("Q")


class TestPoints:
    """Point references"""

    def test_resolve_forms(self, fix_a):
        assert fix_a.resolve_point("node:e1") == Node("e1")
        assert fix_a.resolve_point("e3") == Node("e3")
        assert fix_a.resolve_point("generic:X4") == Smooth("X4", "X4#generic")
        assert fix_a.resolve_point("Q") == Smooth("X2", "Q")

    def test_unknown_point(self, fix_a):
        with pytest.raises(CurveError, match="unknown point"):
            fix_a.resolve_point("Z")

    def test_point_classes(self, fix_a):
        """One generic point per vertex, the labeled points, then the nodes"""
        classes = fix_a.point_classes()

        assert len(classes) == 4 + 4 + 4
        assert classes[0] == Smooth("X1", "X1#generic")
        assert classes[-1] == Node("e4")

    def test_node_meets_both_ends(self, fix_a):
        assert fix_a.point_vertices(Node("e4")) == frozenset({"X2", "X4"})
