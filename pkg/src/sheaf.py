"""
Combinatorial torsion-free rank-1 sheaves on a nodal curve

A sheaf is a formal divisor of point symbols (smooth-point labels and node
branches) together with the set of nodes at which it is not locally free.
Equivalently it is the pushforward of the line bundle O(divisor) from the
partial normalization at those nodes.
"""
import logging
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Tuple, Union

import networkx as nx

from .curve import (
    Branch,
    Curve,
    Node,
    PointOnCurve,
    Symbol,
    chi_structure,
    sorted_vertices,
)
from .errors import CurveError, SheafError, StructureError
from .structure import is_spine, separating_nodes, tail_of

logger = logging.getLogger(__name__)

Terms = Tuple[Tuple[Symbol, int], ...]
DivisorInput = Union[Mapping, Iterable[Tuple[Symbol, int]]]


def _symbol_order(curve: Curve, symbol: Symbol):
    vertex = curve.symbol_vertex(symbol)
    return (curve.index[vertex], str(symbol), isinstance(symbol, Branch))


def _normalize(curve: Curve, terms: Iterable[Tuple[Symbol, int]]) -> Terms:
    total: Counter = Counter()
    for symbol, coefficient in terms:
        try:
            curve.symbol_vertex(symbol)
        except CurveError as exc:
            raise SheafError(f"symbol {symbol} does not live on the curve: {exc}") from None
        total[symbol] += int(coefficient)
    kept = [(s, c) for s, c in total.items() if c != 0]
    return tuple(sorted(kept, key=lambda item: _symbol_order(curve, item[0])))


def _flatten(curve: Curve, div: DivisorInput) -> List[Tuple[Symbol, int]]:
    """Accept {symbol: n}, {vertex: {symbol: n}} or (symbol, n) pairs"""
    if not isinstance(div, Mapping):
        return list(div)
    pairs = []
    for key, value in div.items():
        if isinstance(value, Mapping):
            for symbol, coefficient in value.items():
                try:
                    home = curve.symbol_vertex(symbol)
                except CurveError as exc:
                    raise SheafError(str(exc)) from None
                if home != key:
                    raise SheafError(f"symbol {symbol} lives on {home!r}, not {key!r}")
                pairs.append((symbol, coefficient))
        else:
            pairs.append((key, value))
    return pairs


@dataclass(frozen=True)
class CombSheaf:
    """
    Torsion-free rank-1 sheaf in combinatorial form

    Build through the module constructors; ``divisor`` is kept normalized
    (no zero coefficients, symbols in vertex order).
    """
    curve: Curve
    divisor: Terms = ()
    nonfree: FrozenSet[str] = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "nonfree", frozenset(self.nonfree))
        for edge_id in self.nonfree:
            if edge_id not in self.curve.edge_map:
                raise SheafError(f"unknown nonfree edge {edge_id!r}")
        object.__setattr__(self, "divisor", _normalize(self.curve, self.divisor))

    @cached_property
    def by_vertex(self) -> Dict[str, Dict[Symbol, int]]:
        result: Dict[str, Dict[Symbol, int]] = {v: {} for v in self.curve.vertex_ids}
        for symbol, coefficient in self.divisor:
            result[self.curve.symbol_vertex(symbol)][symbol] = coefficient
        return result

    def divisor_degree(self, vertex: str) -> int:
        return sum(self.by_vertex[vertex].values())

    @property
    def is_locally_free(self) -> bool:
        return not self.nonfree

    def coefficient(self, symbol: Symbol) -> int:
        return dict(self.divisor).get(symbol, 0)

    def __str__(self):
        return format_sheaf(self)


def make_sheaf(curve: Curve, div: DivisorInput = (), nonfree: Iterable[str] = ()) -> CombSheaf:
    return CombSheaf(curve, tuple(_flatten(curve, div)), frozenset(nonfree))


def ideal_sheaf(curve: Curve, q: PointOnCurve) -> CombSheaf:
    """Ideal sheaf of a point: minus the point, or minus both branches of a node"""
    if isinstance(q, Node):
        return CombSheaf(curve, tuple((b, -1) for b in curve.branches(q.edge)), frozenset([q.edge]))
    curve.point_vertices(q)
    return CombSheaf(curve, ((q.label, -1),))


def line_bundle(curve: Curve, div: DivisorInput = ()) -> CombSheaf:
    """O_X(D) for a divisor of smooth points and node branches"""
    return make_sheaf(curve, div)


def trivial(curve: Curve) -> CombSheaf:
    return CombSheaf(curve)


def twister(curve: Curve, tail) -> CombSheaf:
    """
    Twister of a tail Z with generating node N

    Restricts to O_Z(-N) on the tail and O_{Z'}(N) on its complement.
    """
    try:
        record = tail_of(curve, tail)
    except StructureError as exc:
        raise SheafError(f"twister needs a tail: {exc}") from None
    return CombSheaf(curve, (
        (Branch(record.bridge, record.inside), -1),
        (Branch(record.bridge, record.outside), 1),
    ))


def _same_curve(a: CombSheaf, b: CombSheaf):
    if a.curve != b.curve:
        raise SheafError("sheaves live on different curves")


def tensor(sheaf: CombSheaf, bundle: CombSheaf) -> CombSheaf:
    """Tensor product with a line bundle: divisors add, nonfree set kept"""
    _same_curve(sheaf, bundle)
    if not bundle.is_locally_free:
        if not sheaf.is_locally_free:
            raise SheafError("tensor needs at least one locally free argument")
        sheaf, bundle = bundle, sheaf
    return CombSheaf(sheaf.curve, sheaf.divisor + bundle.divisor, sheaf.nonfree)


def inverse(bundle: CombSheaf) -> CombSheaf:
    if not bundle.is_locally_free:
        raise SheafError("only line bundles have inverses")
    return CombSheaf(bundle.curve, tuple((s, -c) for s, c in bundle.divisor))


def dual(sheaf: CombSheaf) -> CombSheaf:
    """Dual sheaf: D_v -> -D_v - (branches of incident nonfree nodes)"""
    terms = [(s, -c) for s, c in sheaf.divisor]
    for edge_id in sheaf.nonfree:
        terms.extend((b, -1) for b in sheaf.curve.branches(edge_id))
    return CombSheaf(sheaf.curve, tuple(terms), sheaf.nonfree)


def twist_down(sheaf: CombSheaf, symbols: Iterable[Symbol]) -> CombSheaf:
    """Twist by -1 at each of the given points"""
    return tensor(sheaf, line_bundle(sheaf.curve, [(s, -1) for s in symbols]))


def degree_on(sheaf: CombSheaf, sub) -> int:
    """deg_Y: divisor degree on Y plus nonfree nodes internal to Y"""
    curve = sheaf.curve
    sub = curve.subcurve(sub)
    degree = sum(sheaf.divisor_degree(v) for v in sub)
    degree += sum(1 for e in sheaf.nonfree if set(curve.edge(e).ends) <= sub)
    return degree


def chi_on(sheaf: CombSheaf, sub=None) -> int:
    """Euler characteristic of the restriction modulo torsion"""
    sub = sheaf.curve.full if sub is None else sub
    return degree_on(sheaf, sub) + chi_structure(sheaf.curve, sub)


def total_degree(sheaf: CombSheaf) -> int:
    return sum(c for _, c in sheaf.divisor) + len(sheaf.nonfree)


def multidegree(sheaf: CombSheaf) -> Tuple[int, ...]:
    """Degree on each component, in vertex order"""
    return tuple(degree_on(sheaf, [v]) for v in sheaf.curve.vertex_ids)


def is_simple(sheaf: CombSheaf, curve: Optional[Curve] = None) -> bool:
    """Simple iff the dual graph minus the nonfree nodes stays connected"""
    curve = curve or sheaf.curve
    if sheaf.is_locally_free:
        return True
    graph = curve.graph.copy()
    for edge_id in sheaf.nonfree:
        edge = curve.edge(edge_id)
        graph.remove_edge(edge.u, edge.v, key=edge.id)
    return nx.is_connected(graph)


def restrict(sheaf: CombSheaf, sub) -> CombSheaf:
    """
    Restriction modulo torsion to a subcurve

    Lives on ``curve.restricted(sub)``: branches of crossing nodes become the
    smooth labeled points of the piece, crossing nonfree nodes are dropped.
    """
    curve = sheaf.curve
    sub = curve.subcurve(sub)
    piece = curve.restricted(sub)
    terms = []
    for symbol, coefficient in sheaf.divisor:
        if curve.symbol_vertex(symbol) not in sub:
            continue
        if isinstance(symbol, Branch) and symbol.edge not in piece.edge_map:
            symbol = str(symbol)
        terms.append((symbol, coefficient))
    nonfree = frozenset(e for e in sheaf.nonfree if e in piece.edge_map)
    return CombSheaf(piece, tuple(terms), nonfree)


def restrict_to_pieces(sheaf: CombSheaf, decomposition: Iterable) -> List[CombSheaf]:
    """Restrictions to the pieces of a spine decomposition"""
    curve = sheaf.curve
    pieces = [curve.subcurve(p) for p in decomposition]
    covered = set()
    for piece in pieces:
        if covered & piece:
            raise SheafError("pieces overlap")
        covered |= piece
    if covered != curve.full:
        raise SheafError("pieces do not cover the curve")
    if len(pieces) > 1:
        for piece in pieces:
            if not curve.is_connected(piece) or not is_spine(curve, piece):
                raise SheafError(f"piece {sorted_vertices(curve, piece)} is not a spine")
            for e in curve.crossing_edges(piece):
                if e.id in sheaf.nonfree:
                    raise SheafError(f"nonfree node {e.id!r} crosses between pieces")
    return [restrict(sheaf, piece) for piece in pieces]


class IsoVerdict(Enum):
    """Outcome of the isomorphism test"""
    ISO = "iso"
    NOT_ISO = "not-iso"
    UNKNOWN = "unknown"


def explain_iso(a: CombSheaf, b: CombSheaf, curve: Optional[Curve] = None) -> Tuple[IsoVerdict, str]:
    """
    Sound three-valued isomorphism test with the rule that decided it

    An isomorphism is multiplication by a rational function h on the partial
    normalization at the common nonfree set, with div(h) = a - b on every
    component and equal values at the two branches of every remaining node.
    """
    _same_curve(a, b)
    curve = curve or a.curve
    if curve != a.curve:
        raise SheafError("sheaves live on a different curve")

    # R1: isomorphism invariants
    if a.nonfree != b.nonfree:
        return IsoVerdict.NOT_ISO, "R1: nonfree nodes differ"
    for v in curve.vertex_ids:
        if a.divisor_degree(v) != b.divisor_degree(v):
            return IsoVerdict.NOT_ISO, f"R1: multidegrees differ on {v}"

    difference = CombSheaf(curve, a.divisor + tuple((s, -c) for s, c in b.divisor))
    by_vertex = difference.by_vertex

    # R2: p - q is never principal on a smooth curve of positive genus
    for v in curve.vertex_ids:
        terms = by_vertex[v]
        if curve.genera[v] >= 1 and sorted(terms.values()) == [-1, 1]:
            return IsoVerdict.NOT_ISO, f"R2: {format_terms(terms.items())} on genus {curve.genera[v]} component {v}"

    constant, certificate, unknown = [], {}, []
    for v in curve.vertex_ids:
        terms = by_vertex[v]
        if not terms:
            constant.append(v)
        elif curve.genera[v] == 0:
            certificate[v] = sum(c for c in terms.values() if c > 0)
        else:
            unknown.append(v)

    # nodes of the partial normalization whose gluing constrains h
    bridges = _free_bridges(curve, a.nonfree)
    constraints = [e for e in curve.edges if e.id not in a.nonfree and e.id not in bridges]
    constrained_branches = {b for e in constraints for b in curve.branches(e.id)}
    if any(s in constrained_branches for s, _ in difference.divisor):
        return IsoVerdict.UNKNOWN, "difference meets a gluing node"

    constant_set = set(constant)
    blobs = nx.Graph()
    blobs.add_nodes_from(constant)
    blobs.add_edges_from((e.u, e.v) for e in constraints if e.u in constant_set and e.v in constant_set)
    blob_of: Dict[str, int] = {}
    for i, comp in enumerate(nx.connected_components(blobs)):
        for v in comp:
            blob_of[v] = i

    def contracted(v):
        return ("blob", blob_of[v]) if v in blob_of else ("vertex", v)

    # R4: a degree-one function cannot repeat a value
    for v, degree in certificate.items():
        if degree != 1:
            continue
        targets = Counter()
        for e in constraints:
            if e.is_loop and e.u == v:
                return IsoVerdict.NOT_ISO, f"R4: degree-1 function on {v} glued to itself at {e.id}"
            if v in e.ends and e.other(v) in blob_of:
                targets[blob_of[e.other(v)]] += 1
        for count in targets.values():
            if count >= 2:
                return IsoVerdict.NOT_ISO, f"R4: degree-1 function on {v} takes one value twice"

    # R3: principal everywhere and the contracted constraint graph is a forest
    if not unknown:
        graph = nx.MultiGraph()
        graph.add_nodes_from(contracted(v) for v in curve.vertex_ids)
        for e in constraints:
            if e.u in constant_set and e.v in constant_set:
                continue
            graph.add_edge(contracted(e.u), contracted(e.v))
        if graph.number_of_edges() == graph.number_of_nodes() - nx.number_connected_components(graph):
            return IsoVerdict.ISO, "R3: principal differences on a forest of gluings"

    return IsoVerdict.UNKNOWN, "no rule applies"


def iso_witness(a: CombSheaf, b: CombSheaf, curve: Optional[Curve] = None) -> IsoVerdict:
    verdict, reason = explain_iso(a, b, curve)
    logger.debug("iso_witness: %s (%s)", verdict.value, reason)
    return verdict


def _free_bridges(curve: Curve, nonfree: FrozenSet[str]) -> FrozenSet[str]:
    """Bridges of the dual graph with the nonfree nodes cut"""
    if not nonfree:
        return separating_nodes(curve)
    kept = tuple(e for e in curve.edges if e.id not in nonfree)
    return separating_nodes(Curve(curve.vertices, kept))


def format_terms(terms: Iterable[Tuple[Symbol, int]]) -> str:
    parts = []
    for symbol, coefficient in terms:
        sign = "-" if coefficient < 0 else "+"
        size = abs(coefficient)
        text = f"{size}*{symbol}" if size != 1 else str(symbol)
        parts.append((sign, text))
    if not parts:
        return "0"
    first_sign, first = parts[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, text in parts[1:]:
        out += f" {sign} {text}"
    return out


def format_sheaf(sheaf: CombSheaf) -> str:
    """Stable multi-line rendering: divisor per vertex, nonfree nodes, multidegree"""
    curve = sheaf.curve
    lines = []
    for v in curve.vertex_ids:
        terms = sorted(sheaf.by_vertex[v].items(), key=lambda item: str(item[0]))
        lines.append(f"  {v}: {format_terms(terms)}")
    nonfree = [e.id for e in curve.edges if e.id in sheaf.nonfree]
    lines.append(f"  nonfree: {', '.join(nonfree) if nonfree else '-'}")
    lines.append(f"  multidegree: ({', '.join(str(d) for d in multidegree(sheaf))})")
    lines.append(f"  degree: {total_degree(sheaf)}")
    return "\n".join(lines)


def sheaf_key(sheaf: CombSheaf) -> str:
    """Canonical text of a sheaf and its curve, used for cache keys"""
    return f"{sheaf.curve!r}|{sheaf.divisor!r}|{sorted(sheaf.nonfree)!r}"
