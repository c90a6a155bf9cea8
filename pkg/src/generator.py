"""
Seeded random nodal curves and sheaves for the property suites
"""
import logging
from typing import List, Optional

import numpy as np

from .config import (
    DEFAULT_SEED,
    MAX_EXTRA_EDGES,
    MAX_LABELED_POINTS,
    MAX_RANDOM_GENUS,
    MAX_RANDOM_VERTICES,
    MAX_REJECTIONS,
)
from .curve import Curve, Edge, Vertex, generic_label, genus_of, is_gstable, make_curve
from .errors import CurveError
from .sheaf import CombSheaf, make_sheaf

logger = logging.getLogger(__name__)


def _raw_curve(rng: np.random.Generator, max_vertices: int, max_genus: int,
               max_extra_edges: int, max_points: int, prefix: str = "v") -> Curve:
    """Random tree plus extra edges; loops and parallel edges allowed"""
    n = int(rng.integers(1, max_vertices + 1))
    ids = [f"{prefix}{i + 1}" for i in range(n)]
    vertices = [Vertex(vid, int(rng.integers(0, max_genus + 1))) for vid in ids]

    pairs = [(ids[int(rng.integers(0, i))], ids[i]) for i in range(1, n)]
    for _ in range(int(rng.integers(0, max_extra_edges + 1))):
        pairs.append((ids[int(rng.integers(0, n))], ids[int(rng.integers(0, n))]))
    tag = "" if prefix == "v" else prefix
    edges = [Edge(f"{tag}e{k + 1}", u, v) for k, (u, v) in enumerate(pairs)]

    points = [(f"{tag}s{k + 1}", ids[int(rng.integers(0, n))])
              for k in range(int(rng.integers(0, max_points + 1)))]
    return make_curve(vertices, edges, points)


def random_curve(rng: np.random.Generator, max_vertices: int = MAX_RANDOM_VERTICES,
                 max_genus: int = MAX_RANDOM_GENUS, max_extra_edges: int = MAX_EXTRA_EDGES,
                 max_points: int = MAX_LABELED_POINTS, gstable: bool = False,
                 max_rejections: int = MAX_REJECTIONS) -> Curve:
    """
    Random connected curve

    Args:
        rng: numpy generator, the only source of randomness
        gstable: rejection-sample until the curve is G-stable
    """
    for _ in range(max_rejections):
        curve = _raw_curve(rng, max_vertices, max_genus, max_extra_edges, max_points)
        if not gstable or is_gstable(curve):
            return curve
    raise CurveError(f"no G-stable curve after {max_rejections} attempts")


def random_split_curve(rng: np.random.Generator, max_vertices: int = MAX_RANDOM_VERTICES,
                       max_genus: int = MAX_RANDOM_GENUS, max_extra_edges: int = MAX_EXTRA_EDGES,
                       max_points: int = MAX_LABELED_POINTS,
                       max_rejections: int = MAX_REJECTIONS) -> Curve:
    """G-stable curve with a splitting node: two halves of equal genus joined by a bridge"""
    half = max(1, max_vertices // 2)
    for _ in range(max_rejections):
        left = _raw_curve(rng, half, max_genus, max_extra_edges, max_points, prefix="a")
        right = _raw_curve(rng, half, max_genus, max_extra_edges, max_points, prefix="b")
        if genus_of(left) != genus_of(right) or genus_of(left) == 0:
            continue
        u = left.vertex_ids[int(rng.integers(0, len(left.vertices)))]
        v = right.vertex_ids[int(rng.integers(0, len(right.vertices)))]
        curve = make_curve(left.vertices + right.vertices,
                           left.edges + right.edges + (Edge("n", u, v),),
                           left.points + right.points)
        if is_gstable(curve):
            return curve
    raise CurveError(f"no split G-stable curve after {max_rejections} attempts")


def random_corpus(seed: int = DEFAULT_SEED, count: int = 10, **kwargs) -> List[Curve]:
    """Reproducible list of random connected curves"""
    rng = np.random.default_rng(seed)
    return [random_curve(rng, **kwargs) for _ in range(count)]


def random_gstable_corpus(seed: int = DEFAULT_SEED, count: int = 10,
                          split_every: Optional[int] = 4, **kwargs) -> List[Curve]:
    """
    Reproducible list of G-stable curves

    Every ``split_every``-th curve is forced to carry a splitting node.
    """
    rng = np.random.default_rng(seed)
    corpus = []
    for i in range(count):
        if split_every and i % split_every == split_every - 1:
            corpus.append(random_split_curve(rng, **kwargs))
        else:
            corpus.append(random_curve(rng, gstable=True, **kwargs))
    return corpus


def random_sheaf(rng: np.random.Generator, curve: Curve, degree: int,
                 nonfree_probability: float = 0.3, spread: int = 2) -> CombSheaf:
    """Random sheaf of the given total degree supported at smooth points"""
    nonfree = [e.id for e in curve.edges if rng.random() < nonfree_probability]
    terms = []
    for v in curve.vertex_ids:
        labels = [generic_label(v)] + curve.labels_on(v)
        for label in labels:
            coefficient = int(rng.integers(-spread, spread + 1))
            if coefficient:
                terms.append((label, coefficient))
    current = sum(c for _, c in terms) + len(nonfree)
    terms.append((generic_label(curve.vertex_ids[0]), degree - current))
    return make_sheaf(curve, terms, nonfree)
