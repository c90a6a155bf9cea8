"""
Twisted Abel maps of degree 0 and 1

Degree 0: Q -> M_Q (x) O(P) (x) twisters^-1 over the tails avoiding P that contain Q.
Degree 1: Q -> N_Q^* (x) twisters over the small tails containing Q.

Also the fibers of the degree-0 map on point classes and the image curve
obtained by contracting maximal separating trees of lines.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Tuple, Union

import networkx as nx

from .curve import (
    Branch,
    Curve,
    Node,
    PointOnCurve,
    Smooth,
    Subcurve,
    genus_of,
    point_key,
    sorted_vertices,
)
from .errors import AbelError, CurveError
from .sheaf import (
    CombSheaf,
    IsoVerdict,
    dual,
    ideal_sheaf,
    inverse,
    is_simple,
    iso_witness,
    line_bundle,
    restrict_to_pieces,
    tensor,
    twister,
)
from .structure import (
    TailTable,
    all_tails,
    contains_point,
    is_spine,
    maximal_line_trees,
    separating_lines,
    separating_nodes,
    tails_of_bridge,
)

logger = logging.getLogger(__name__)

BaseInput = Union[str, Smooth]


def point_classes(curve: Curve) -> List[PointOnCurve]:
    """Generic point per vertex, every labeled point, every node"""
    return curve.point_classes()


def resolve_base(curve: Curve, base: BaseInput) -> Smooth:
    """Base point as a smooth point; accepts a label, ``generic:<v>`` or a Smooth"""
    if isinstance(base, Smooth):
        point = base
    elif isinstance(base, Node):
        raise AbelError(f"base point must be smooth, got node {base.edge!r}")
    else:
        try:
            point = curve.resolve_point(base)
        except CurveError as exc:
            raise AbelError(str(exc)) from None
    if isinstance(point, Node):
        raise AbelError(f"base point must be smooth, got node {point.edge!r}")
    curve.point_vertices(point)
    return point


def base_vertex(curve: Curve, base: BaseInput) -> str:
    return resolve_base(curve, base).vertex


def abel0(curve: Curve, base: BaseInput, q: PointOnCurve) -> CombSheaf:
    """Degree-0 Abel sheaf I_Q with base point P"""
    p = resolve_base(curve, base)
    bridges = separating_nodes(curve)

    if isinstance(q, Node) and q.edge in bridges:
        # M_Q is O(-N) on the side of N away from P
        side = next(t for t in tails_of_bridge(curve, q.edge) if p.vertex not in t.vertices)
        result = line_bundle(curve, {Branch(q.edge, side.inside): -1})
    else:
        result = ideal_sheaf(curve, q)

    result = tensor(result, line_bundle(curve, {p.label: 1}))
    for tail in all_tails(curve):
        if p.vertex in tail.vertices or not contains_point(curve, tail.vertices, q):
            continue
        result = tensor(result, inverse(twister(curve, tail.vertices)))

    if not is_simple(result):
        raise AbelError(f"degree-0 Abel sheaf at {q} is not simple")
    return result


def abel1(curve: Curve, table: TailTable, q: PointOnCurve) -> CombSheaf:
    """Degree-1 Abel sheaf I^1_Q; depends on the splitting-node choice in ``table``"""
    if table.curve != curve:
        raise AbelError("tail table belongs to another curve")
    if isinstance(q, Node) and q.edge in separating_nodes(curve):
        small = table.entry(q.edge).small
        edge = curve.edge(q.edge)
        inside = edge.u if edge.u in small else edge.v
        n_q = line_bundle(curve, {Branch(q.edge, inside): -1})
    else:
        n_q = ideal_sheaf(curve, q)

    result = dual(n_q)
    for tail in table.containing(q):
        result = tensor(result, twister(curve, tail))

    if not is_simple(result):
        raise AbelError(f"degree-1 Abel sheaf at {q} is not simple")
    return result


@dataclass
class RestrictionReport:
    """Behaviour of I_Q on a spine W and its complement as Q moves on W"""
    spine: Subcurve
    base_label: str
    points: List[PointOnCurve] = field(default_factory=list)
    complement_pieces: List[Subcurve] = field(default_factory=list)
    complement_verdicts: List[Tuple[Subcurve, PointOnCurve, IsoVerdict]] = field(default_factory=list)
    spine_verdicts: List[Tuple[PointOnCurve, IsoVerdict]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return (all(v == IsoVerdict.ISO for _, _, v in self.complement_verdicts)
                and all(v == IsoVerdict.ISO for _, v in self.spine_verdicts))


def verify_restriction(curve: Curve, base: BaseInput, spine) -> RestrictionReport:
    """
    Check how the degree-0 Abel sheaves restrict across a spine W

    On each component of the complement the restriction does not depend on
    Q in W; on W it is the degree-0 Abel sheaf of W itself, based at P when
    P lies on W and otherwise at the branch on W of the node leading to P.
    """
    p = resolve_base(curve, base)
    spine = curve.subcurve(spine)
    if not curve.is_connected(spine) or not is_spine(curve, spine):
        raise AbelError(f"{sorted_vertices(curve, spine)} is not a spine")

    rest = curve.complement(spine)
    pieces = curve.components(rest) if rest else []
    if p.vertex in spine:
        base_label = p.label
    else:
        toward = next(c for c in pieces if p.vertex in c)
        edge = curve.crossing_edges(toward)[0]
        base_label = str(Branch(edge.id, edge.u if edge.u in spine else edge.v))

    report = RestrictionReport(spine, base_label, complement_pieces=pieces)
    w_curve = curve.restricted(spine)
    reference: Dict[Subcurve, CombSheaf] = {}
    for q in point_classes(curve):
        vertices = curve.point_vertices(q)
        if vertices <= spine:
            w_point = q
        elif isinstance(q, Node) and vertices & spine:
            # boundary node: the branch on W becomes a smooth point of W
            edge = curve.edge(q.edge)
            inside = edge.u if edge.u in spine else edge.v
            w_point = Smooth(inside, str(Branch(edge.id, inside)))
        else:
            continue
        report.points.append(q)
        sheaf = abel0(curve, p, q)
        restricted = restrict_to_pieces(sheaf, [spine] + pieces)

        expected = abel0(w_curve, base_label, w_point)
        report.spine_verdicts.append((q, iso_witness(restricted[0], expected)))
        for piece, piece_sheaf in zip(pieces, restricted[1:]):
            first = reference.setdefault(piece, piece_sheaf)
            report.complement_verdicts.append((piece, q, iso_witness(first, piece_sheaf)))
    return report


# --- fibers and image curve --------------------------------------------------

Partition = List[FrozenSet[PointOnCurve]]


def fiber_partition(curve: Curve) -> Partition:
    """
    Fibers of the degree-0 Abel map on point classes

    All classes on a maximal separating tree of lines, together with the
    nodes meeting it, form one block; every other class is its own block.
    """
    if genus_of(curve) == 0:
        raise AbelError("fiber partition needs positive genus")
    classes = point_classes(curve)
    block_of: Dict[PointOnCurve, int] = {}
    for i, tree in enumerate(maximal_line_trees(curve)):
        for q in classes:
            if curve.point_vertices(q) & tree.vertices:
                block_of[q] = i

    blocks: Dict[object, List[PointOnCurve]] = {}
    for q in classes:
        key = ("tree", block_of[q]) if q in block_of else ("point", point_key(q))
        blocks.setdefault(key, []).append(q)
    return [frozenset(members) for members in blocks.values()]


def fiber_block_of(partition: Partition, q: PointOnCurve) -> FrozenSet[PointOnCurve]:
    for block in partition:
        if q in block:
            return block
    raise AbelError(f"point {q} is not in the partition")


@dataclass(frozen=True)
class SingularPoint:
    """Singular point of a generalized curve, one (component, symbol) per branch"""
    name: str
    branches: Tuple[Tuple[str, str], ...]

    @property
    def order(self) -> int:
        return len(self.branches)


@dataclass(frozen=True)
class GeneralizedCurve:
    """Components with genera glued at ordinary multiple points"""
    components: Tuple[Tuple[str, int], ...]
    points: Tuple[SingularPoint, ...] = ()

    def __post_init__(self):
        names = {c for c, _ in self.components}
        seen = set()
        for point in self.points:
            if point.order < 2:
                raise AbelError(f"singular point {point.name} has fewer than two branches")
            for component, symbol in point.branches:
                if component not in names:
                    raise AbelError(f"branch on unknown component {component!r}")
                if (component, symbol) in seen:
                    raise AbelError(f"repeated branch {symbol} on {component}")
                seen.add((component, symbol))

    def is_connected(self) -> bool:
        graph = nx.Graph()
        graph.add_nodes_from(c for c, _ in self.components)
        for point in self.points:
            first = point.branches[0][0]
            graph.add_edges_from((first, c) for c, _ in point.branches[1:])
        return nx.is_connected(graph)

    def describe(self) -> str:
        lines = ["components:"]
        lines += [f"  {c} genus={g}" for c, g in self.components]
        lines.append("singular points:")
        for point in self.points:
            branches = ", ".join(f"{s} on {c}" for c, s in point.branches)
            lines.append(f"  {point.name} ({point.order} branches): {branches}")
        return "\n".join(lines)


def image_curve(curve: Curve) -> GeneralizedCurve:
    """
    Contract every maximal separating tree of lines

    A tree meeting the rest of the curve in delta >= 2 nodes becomes an
    ordinary delta-fold point; with delta = 1 it becomes a smooth point.
    Every other node stays an ordinary double point.
    """
    if genus_of(curve) == 0:
        raise AbelError("image curve needs positive genus")
    lines = separating_lines(curve)
    components = tuple((v.id, v.genus) for v in curve.vertices if v.id not in lines)

    points = []
    for tree in maximal_line_trees(curve):
        if tree.delta < 2:
            continue
        branches = []
        for edge_id in tree.attachments:
            edge = curve.edge(edge_id)
            outer = edge.v if edge.u in tree.vertices else edge.u
            branches.append((outer, str(Branch(edge_id, outer))))
        name = "R(" + ",".join(sorted_vertices(curve, tree.vertices)) + ")"
        points.append(SingularPoint(name, tuple(branches)))

    for edge in curve.edges:
        if edge.u in lines or edge.v in lines:
            continue
        branches = tuple((b.vertex, str(b)) for b in curve.branches(edge.id))
        points.append(SingularPoint(edge.id, branches))

    image = GeneralizedCurve(components, tuple(points))
    if not image.is_connected():
        raise AbelError("contracted curve is not connected")
    return image


def gen_genus(gc: GeneralizedCurve) -> int:
    """Sum of genera + sum over points of (branches - 1) - components + 1"""
    if not gc.is_connected():
        raise AbelError("generalized curve is not connected")
    return (sum(g for _, g in gc.components) + sum(p.order - 1 for p in gc.points)
            - len(gc.components) + 1)
