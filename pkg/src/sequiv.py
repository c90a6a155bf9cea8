"""
Jordan-Hölder filtrations, graded pieces and S-equivalence

Also checks where the S-map collapses the Abel images.
"""
import logging
from dataclasses import dataclass, field
from typing import FrozenSet, List, Optional, Tuple

import networkx as nx

from .abel import Partition, abel0, abel1, base_vertex, fiber_partition, resolve_base
from .cache import ReportCache
from .config import JH_EXHAUSTIVE_MAX_VERTICES
from .curve import (
    Branch,
    Curve,
    PointOnCurve,
    Subcurve,
    generic_label,
    is_gstable,
    point_key,
    sorted_vertices,
)
from .errors import SEquivalenceError
from .sheaf import CombSheaf, IsoVerdict, chi_on, iso_witness, restrict, twist_down
from .stability import Classification, StabilityContext, StabilityReport, classify
from .structure import TailTable, basepoint_off_small_tails, small_tails

logger = logging.getLogger(__name__)

Chain = List[Subcurve]


@dataclass
class SClass:
    """Parts of a Jordan-Hölder filtration and the graded sheaf on each part"""
    chain: Chain
    parts: List[Subcurve]
    gr: List[Tuple[Subcurve, CombSheaf]] = field(default_factory=list)

    @property
    def part_set(self) -> FrozenSet[Subcurve]:
        return frozenset(self.parts)

    def piece(self, part: Subcurve) -> CombSheaf:
        for sub, sheaf in self.gr:
            if sub == part:
                return sheaf
        raise SEquivalenceError(f"no graded piece on {sorted(part)}")


def _semistable_report(sheaf: CombSheaf, ctx: StabilityContext,
                       cache: Optional[ReportCache]) -> StabilityReport:
    report = classify(sheaf, ctx, cache=cache)
    if not report.is_semistable:
        raise SEquivalenceError("sheaf is not semistable")
    return report


def zero_margin_subcurves(sheaf: CombSheaf, ctx: StabilityContext,
                          cache: Optional[ReportCache] = None) -> List[Subcurve]:
    """Proper subcurves of zero margin, in enumeration order"""
    return _semistable_report(sheaf, ctx, cache).zero_margin


def _covers(current: Subcurve, zeros: List[Subcurve]) -> List[Subcurve]:
    """Zero-margin subcurves minimally above ``current``"""
    above = [z for z in zeros if current < z]
    return [z for z in above if not any(current < y < z for y in above)]


def jh_filtration(sheaf: CombSheaf, ctx: StabilityContext,
                  cache: Optional[ReportCache] = None) -> Chain:
    """
    A maximal chain Y_1 < ... < Y_{q-1} of zero-margin proper subcurves

    Greedy: each step takes the first zero-margin strict superset in
    enumeration order, which is a smallest one.
    """
    zeros = zero_margin_subcurves(sheaf, ctx, cache)
    chain: Chain = []
    current: Subcurve = frozenset()
    while True:
        above = [z for z in zeros if current < z]
        if not above:
            break
        current = above[0]
        chain.append(current)

    # no zero-margin subcurve may refine the chain
    bounds = [frozenset()] + chain + [sheaf.curve.full]
    for low, high in zip(bounds, bounds[1:]):
        if any(low < z < high for z in zeros):
            raise SEquivalenceError("greedy chain is not maximal")
    logger.debug("JH chain: %s", [sorted(y) for y in chain])
    return chain


def all_jh_filtrations(sheaf: CombSheaf, ctx: StabilityContext,
                       max_vertices: int = JH_EXHAUSTIVE_MAX_VERTICES,
                       cache: Optional[ReportCache] = None) -> List[Chain]:
    """Every maximal zero-margin chain, by depth-first search"""
    if len(sheaf.curve.vertices) > max_vertices:
        raise SEquivalenceError(f"exhaustive chain search limited to {max_vertices} vertices")
    zeros = zero_margin_subcurves(sheaf, ctx, cache)
    chains: List[Chain] = []

    def extend(prefix: Chain, current: Subcurve):
        nxt = _covers(current, zeros)
        if not nxt:
            chains.append(list(prefix))
            return
        for z in nxt:
            extend(prefix + [z], z)

    extend([], frozenset())
    return chains


def chain_parts(curve: Curve, chain: Chain) -> List[Subcurve]:
    """Y_1, Y_2 - Y_1, ..., X - Y_{q-1}"""
    parts = []
    previous: Subcurve = frozenset()
    for y in list(chain) + [curve.full]:
        parts.append(y - previous)
        previous = y
    return parts


def graded_pieces(sheaf: CombSheaf, parts: List[Subcurve]) -> List[Tuple[Subcurve, CombSheaf]]:
    """
    Restriction to each part, twisted down at its locally free nodes
    meeting the union of the earlier parts
    """
    curve = sheaf.curve
    gr = []
    earlier: Subcurve = frozenset()
    for part in parts:
        piece = restrict(sheaf, part)
        attachments = []
        for e in curve.crossing_edges(part):
            if e.id in sheaf.nonfree:
                continue
            inside = e.u if e.u in part else e.v
            if e.other(inside) in earlier:
                attachments.append(str(Branch(e.id, inside)))
        gr.append((part, twist_down(piece, attachments)))
        earlier = earlier | part
    return gr


def s_invariants(sheaf: CombSheaf, ctx: StabilityContext, chain: Optional[Chain] = None,
                 cache: Optional[ReportCache] = None) -> SClass:
    """Parts and graded sheaf of a semistable sheaf"""
    if chain is None:
        chain = jh_filtration(sheaf, ctx, cache)
    parts = chain_parts(sheaf.curve, chain)
    gr = graded_pieces(sheaf, parts)

    chi_gr = sum(chi_on(piece) for _, piece in gr)
    if chi_gr != chi_on(sheaf):
        raise SEquivalenceError(f"chi(Gr) = {chi_gr} differs from chi(I) = {chi_on(sheaf)}")
    return SClass(list(chain), parts, gr)


def compare_sclasses(a: SClass, b: SClass) -> Optional[bool]:
    """True, False, or None when some piece comparison is undecided"""
    if a.part_set != b.part_set:
        return False
    undecided = False
    for part in a.parts:
        verdict = iso_witness(a.piece(part), b.piece(part))
        if verdict == IsoVerdict.NOT_ISO:
            return False
        if verdict == IsoVerdict.UNKNOWN:
            undecided = True
    return None if undecided else True


def s_equivalent(a: CombSheaf, b: CombSheaf, ctx: StabilityContext,
                 cache: Optional[ReportCache] = None) -> Optional[bool]:
    """S-equivalence of two semistable sheaves; None when undecided"""
    return compare_sclasses(s_invariants(a, ctx, cache=cache), s_invariants(b, ctx, cache=cache))


@dataclass
class CollapseReport:
    """How S-equivalence groups the fibers of an Abel map"""
    degree: int
    blocks: Partition
    classes: List[List[int]] = field(default_factory=list)  # indices into blocks
    merges: List[Tuple[int, int]] = field(default_factory=list)
    unknown_pairs: List[Tuple[int, int]] = field(default_factory=list)
    violations: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def representative(self, index: int) -> PointOnCurve:
        return _representative(self.blocks[index])


def _representative(block: FrozenSet[PointOnCurve]) -> PointOnCurve:
    return min(block, key=point_key)


def collapse_analysis(curve: Curve, degree: int, base: Optional[str] = None,
                      table: Optional[TailTable] = None,
                      cache: Optional[ReportCache] = None) -> CollapseReport:
    """
    S-equivalence classes of the Abel images of the fiber blocks

    Degree 0 reports merges. Degree 1 requires a G-stable curve and records
    a violation for any merge, for a stable output on a curve with a
    splitting node, for a non-stable output without one, and for a
    Jordan-Hölder chain other than the chosen small tail of the splitting node.
    """
    if degree not in (0, 1):
        raise SEquivalenceError(f"collapse analysis covers degrees 0 and 1, not {degree}")
    blocks = fiber_partition(curve)
    report = CollapseReport(degree, blocks)

    if degree == 0:
        base = base or generic_label(curve.vertex_ids[0])
        p = resolve_base(curve, base)
        ctx = StabilityContext(curve, 0, p.vertex)

        def sheaf_of(q):
            return abel0(curve, p, q)
    else:
        if not is_gstable(curve):
            raise SEquivalenceError("degree-1 collapse analysis needs a G-stable curve")
        table = table or small_tails(curve)
        if base is None:
            base = generic_label(basepoint_off_small_tails(curve, table))
        ctx = StabilityContext(curve, 1, base_vertex(curve, base))

        def sheaf_of(q):
            return abel1(curve, table, q)

    sclasses: List[Optional[SClass]] = []
    for i, block in enumerate(blocks):
        q = _representative(block)
        sheaf = sheaf_of(q)
        stability = classify(sheaf, ctx, cache=cache)
        if not stability.is_semistable:
            report.violations.append(f"Abel sheaf at {q} is unstable")
            sclasses.append(None)
            continue
        if degree == 1:
            detail = degree_one_violation(curve, table, q, sheaf, ctx, stability, cache)
            if detail is not None:
                report.violations.append(detail)
        sclasses.append(s_invariants(sheaf, ctx, cache=cache))

    graph = nx.Graph()
    graph.add_nodes_from(range(len(blocks)))
    for i in range(len(blocks)):
        for j in range(i + 1, len(blocks)):
            if sclasses[i] is None or sclasses[j] is None:
                continue
            same = compare_sclasses(sclasses[i], sclasses[j])
            if same is None:
                report.unknown_pairs.append((i, j))
            elif same:
                report.merges.append((i, j))
                graph.add_edge(i, j)
                if degree == 1:
                    report.violations.append(
                        f"blocks of {_representative(blocks[i])} and {_representative(blocks[j])} merge")
    report.classes = sorted(sorted(c) for c in nx.connected_components(graph))
    logger.debug("collapse degree %d: %d blocks, %d merges", degree, len(blocks), len(report.merges))
    return report


def degree_one_violation(curve: Curve, table: TailTable, q: PointOnCurve, sheaf: CombSheaf,
                         ctx: StabilityContext, stability: Optional[StabilityReport] = None,
                         cache: Optional[ReportCache] = None) -> Optional[str]:
    """
    Splitting-node behaviour of a degree-1 Abel sheaf on a G-stable curve

    Without a splitting node the sheaf must be stable. With one it must be
    strictly semistable with Jordan-Hölder chain exactly the chosen small
    tail. Returns a description of the failure, or None.
    """
    if stability is None:
        stability = classify(sheaf, ctx, cache=cache)
    splitting = table.splitting_nodes
    if not splitting:
        if stability.classification != Classification.STABLE:
            return f"degree-1 sheaf at {q} is not stable without a splitting node"
        return None
    if stability.classification != Classification.STRICTLY_SEMISTABLE:
        return f"degree-1 sheaf at {q} is not strictly semistable"
    expected = [table.entry(splitting[0]).small]
    chain = jh_filtration(sheaf, ctx, cache)
    if chain != expected:
        return (f"JH chain at {q} is {[sorted_vertices(curve, y) for y in chain]}, "
                f"expected {[sorted_vertices(curve, y) for y in expected]}")
    return None
