"""
Tests for the theorem suite and the seeded random generators
"""
import numpy as np
import pytest

from src.curve import generic_label, genus_of, is_gstable
from src.generator import random_corpus, random_gstable_corpus, random_sheaf
from src.sheaf import line_bundle, total_degree
from src.theorems import TheoremSuite, Violation


class TestGenerator:
    """Seeded corpora"""

    def test_same_seed_same_corpus(self):
        assert random_corpus(seed=7, count=5) == random_corpus(seed=7, count=5)

    def test_gstable_corpus(self):
        corpus = random_gstable_corpus(seed=3, count=4)
        assert all(is_gstable(c) for c in corpus)
        assert any(e.id == "n" for c in corpus for e in c.edges)

    def test_random_sheaf_degree(self, rng, fix_a):
        for degree in range(-2, 3):
            assert total_degree(random_sheaf(rng, fix_a, degree)) == degree


class TestSuite:
    """Property checks on fixtures and small corpora"""

    @pytest.mark.parametrize("name", ["fix_a", "fix_b", "fix_c", "fix_d", "fix_e", "star"])
    def test_fixtures_pass(self, name, request, report_cache):
        curve = request.getfixturevalue(name)
        suite = TheoremSuite(cache=report_cache, seed=1)
        assert suite.check_curve(curve, name) == []
        assert suite.checks_run > 0

    def test_small_corpus(self, report_cache, capsys):
        suite = TheoremSuite(cache=report_cache, seed=11)
        suite.run_corpus(seed=11, count=5, gstable_count=3, seshadri_count=3)
        out = capsys.readouterr().out
        assert suite.ok, suite.summary()
        assert "✓ Connected corpus done" in out
        assert suite.curves_checked == 8

    def test_connected_suite_alone(self, report_cache, capsys):
        suite = TheoremSuite(cache=report_cache, seed=11)
        suite.run_corpus(seed=11, count=4, gstable_count=3, seshadri_count=3, suites=("connected",))
        out = capsys.readouterr().out
        assert suite.ok, suite.summary()
        assert suite.curves_checked == 4
        assert "✓ Connected corpus done in " in out
        assert "G-stable corpus" not in out
        assert "Seshadri" not in out

    def test_gstable_suite_alone(self, report_cache, capsys):
        suite = TheoremSuite(cache=report_cache, seed=11)
        suite.run_corpus(seed=11, count=4, gstable_count=3, seshadri_count=3, suites=("gstable",))
        out = capsys.readouterr().out
        assert suite.ok, suite.summary()
        assert suite.curves_checked == 3
        assert "✓ G-stable corpus done in " in out
        assert "Connected corpus" not in out

    def test_seshadri_suite_alone(self, report_cache, capsys):
        """The G-stable corpus is still generated to draw the triples from"""
        suite = TheoremSuite(cache=report_cache, seed=11)
        suite.run_corpus(seed=11, count=4, gstable_count=3, seshadri_count=5, suites=("seshadri",))
        out = capsys.readouterr().out
        assert suite.ok, suite.summary()
        assert suite.curves_checked == 0
        assert suite.checks_run == 5
        assert "✓ Seshadri comparison done in " in out

    def test_unknown_suite(self, report_cache):
        suite = TheoremSuite(cache=report_cache)
        with pytest.raises(ValueError, match="unknown suites"):
            suite.run_corpus(count=1, suites=("everything",))

    def test_degree_one_only_skips_connected_checks(self, fix_a, fix_c, report_cache):
        """
        Test the reduced check set used on the G-stable corpus

        Tails, abel1 and collapse on a G-stable curve; tails alone otherwise.
        """
        suite = TheoremSuite(cache=report_cache, seed=1)
        assert suite.check_curve(fix_a, "fix_a", degree_one_only=True) == []
        assert suite.checks_run == 3
        suite.check_curve(fix_c, "fix_c", degree_one_only=True)
        assert suite.checks_run == 4
        assert suite.curves_checked == 2

    def test_cache_reused(self, report_cache, fix_a):
        suite = TheoremSuite(cache=report_cache, seed=1)
        suite.check_curve(fix_a, "first")
        hits = report_cache.hits
        suite.check_curve(fix_a, "second")
        assert report_cache.hits > hits

    def test_summary(self, fix_d):
        suite = TheoremSuite(seed=2)
        suite.check_curve(fix_d, "fix_d")
        lines = suite.summary().splitlines()
        assert lines[0] == "curves checked: 1"
        assert lines[2] == "violations:     0"

    def test_violation_format(self):
        assert str(Violation("fibers", "fix_a", "Q vs Q2")) == "[fibers] fix_a: Q vs Q2"

    def test_genus_matches_image(self, fix_c):
        """The image check runs for positive genus"""
        suite = TheoremSuite(seed=4)
        suite.check_curve(fix_c, "fix_c")
        assert genus_of(fix_c) == 2
        assert suite.ok


class TestDegreeOneChecks:
    """Degree-1 Abel checks over every point class"""

    @pytest.mark.parametrize("name", ["fix_a", "fix_b", "star"])
    def test_abel1_checks_pass(self, name, request, report_cache):
        curve = request.getfixturevalue(name)
        if not is_gstable(curve):
            pytest.skip(f"{name} is not G-stable")
        suite = TheoremSuite(cache=report_cache, seed=1)
        suite._check_abel1(curve, name)
        assert suite.violations == []

    def test_wrong_chain_flagged_at_every_point(self, fix_b, report_cache, monkeypatch):
        """
        Test that the splitting-node check runs on each point class

        With degree 1 on v1 the zero-margin tail is {v2}, not the default
        small tail {v1}.
        """
        monkeypatch.setattr("src.theorems.abel1",
                            lambda curve, table, q: line_bundle(curve, {generic_label("v1"): 1}))
        suite = TheoremSuite(cache=report_cache, seed=1)
        suite._check_abel1(fix_b, "fix_b")
        splitting = [v for v in suite.violations if v.check == "splitting"]
        assert len(splitting) == 4
        assert all("JH chain" in v.detail for v in splitting)
