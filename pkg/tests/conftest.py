"""
Shared pytest fixtures for nodal-abel tests

Provides:
- The shipped fixture curves FIX-A ... FIX-E and the elliptic star
- Report cache instances
"""
from pathlib import Path

import numpy as np
import pytest

from src.cache import ReportCache
from src.cli import parse_curve_file
from src.curve import Curve

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def load(name: str) -> Curve:
    return parse_curve_file(FIXTURES / f"{name}.curve").curve


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def fix_a() -> Curve:
    """
    Rational X1, X2 joined by e1, e2; elliptic X3 on X1 (e3) and X4 on X2 (e4)

    Points: P on X1, Q and Q2 on X2, M on X3.
    """
    return load("fix_a")


@pytest.fixture
def fix_b() -> Curve:
    """Elliptic v1, v2 joined by the splitting node e; Q on v2"""
    return load("fix_b")


@pytest.fixture
def fix_c() -> Curve:
    """Chain v1 - L - v2 with elliptic ends; P on v1, Q1 and Q2 on L, Q on v2"""
    return load("fix_c")


@pytest.fixture
def fix_d() -> Curve:
    """Smooth genus 2 curve X with points A, B"""
    return load("fix_d")


@pytest.fixture
def fix_e() -> Curve:
    """Banana: lines b1, b2 meeting in e1, e2, e3; s1, s2 on b1, t1 on b2"""
    return load("fix_e")


@pytest.fixture
def star() -> Curve:
    """Line C carrying three elliptic tails E1, E2, E3"""
    return load("star")


@pytest.fixture
def report_cache() -> ReportCache:
    return ReportCache()


@pytest.fixture
def small_cache() -> ReportCache:
    return ReportCache(max_size=3)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(0)
