"""
Tests for Graphviz DOT export
"""
import re

from src.abel import image_curve
from src.dot import export_dot, export_image_dot


class TestCurveDot:
    """Dual graph export"""

    def test_separating_line_shaded(self, fix_c):
        dot = export_dot(fix_c)
        assert dot.count("fillcolor=lightgrey") == 1
        assert '"L" [label="L\\ng=0\\nQ1, Q2", style=filled, fillcolor=lightgrey];' in dot

    def test_bridges_bold(self, fix_a):
        dot = export_dot(fix_a)
        assert '"X1" -- "X3" [label="e3", style=bold];' in dot
        assert '"X1" -- "X2" [label="e1"];' in dot

    def test_single_component(self, fix_d):
        """One node, no edges, no clusters"""
        dot = export_dot(fix_d)
        assert dot.startswith('graph "curve" {\n')
        assert dot.count(" [label=") == 1
        assert " -- " not in dot
        assert "subgraph" not in dot

    def test_small_tail_clusters(self, fix_a):
        """The two small tails of FIX-A are disjoint, so both become clusters"""
        dot = export_dot(fix_a)
        assert dot.count("subgraph cluster_") == 2
        assert 'label="tail X3";' in dot
        assert 'label="tail X4";' in dot

    def test_every_vertex_placed_once(self, fix_c):
        dot = export_dot(fix_c, name="chain")
        for vid in ("v1", "L", "v2"):
            assert len(re.findall(rf'^\s*"{vid}" \[label=', dot, re.M)) == 1
        assert dot.rstrip().endswith("}")


class TestImageDot:
    """Image curve export"""

    def test_contracted_line_is_star(self, fix_c):
        dot = export_image_dot(image_curve(fix_c))
        assert '"pt:R(L)" [shape=star, label="R(L) (2)"];' in dot
        assert '"pt:R(L)" -- "v1" [label="e1@v1"];' in dot
        assert '"L"' not in dot

    def test_double_points_are_edges(self, fix_e):
        dot = export_image_dot(image_curve(fix_e))
        assert "shape=star" not in dot
        assert dot.count(" -- ") == 3

    def test_triple_point(self, star):
        dot = export_image_dot(image_curve(star))
        assert 'label="R(C) (3)"' in dot
