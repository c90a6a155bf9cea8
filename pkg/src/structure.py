"""
Separating structure of a nodal curve

Bridges (separating nodes), tails, small tails and splitting nodes, spines,
separating lines and maximal trees of separating lines.
"""
import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, FrozenSet, List, Optional, Tuple

import networkx as nx

from .config import SPINE_ENUM_MAX_VERTICES
from .curve import (
    Curve,
    PointOnCurve,
    Subcurve,
    genus_of,
    is_gstable,
    proper_subcurves,
    sorted_vertices,
)
from .errors import StructureError

logger = logging.getLogger(__name__)


@lru_cache(maxsize=4096)
def separating_nodes(curve: Curve) -> FrozenSet[str]:
    """
    Bridge edges of the dual graph

    Loops and parallel edges are never bridges, so bridges are computed on the
    simple underlying graph and kept only where the edge has multiplicity one.
    """
    simple = nx.Graph()
    simple.add_nodes_from(curve.vertex_ids)
    multiplicity: Dict[FrozenSet[str], List[str]] = {}
    for e in curve.edges:
        if e.is_loop:
            continue
        multiplicity.setdefault(frozenset(e.ends), []).append(e.id)
        simple.add_edge(e.u, e.v)

    found = set()
    for u, v in nx.bridges(simple):
        ids = multiplicity[frozenset((u, v))]
        if len(ids) == 1:
            found.add(ids[0])
    return frozenset(found)


def bridges_in_order(curve: Curve) -> List[str]:
    bridges = separating_nodes(curve)
    return [e.id for e in curve.edges if e.id in bridges]


@dataclass(frozen=True)
class Tail:
    """Tail of a curve together with its generating bridge"""
    vertices: Subcurve
    bridge: str
    inside: str  # endpoint of the bridge on the tail
    outside: str  # endpoint on the complement


def tails_of_bridge(curve: Curve, edge_id: str) -> Tuple[Tail, Tail]:
    """The two tails generated by a bridge: the side of its first endpoint, then the other"""
    if edge_id not in separating_nodes(curve):
        raise StructureError(f"edge {edge_id!r} is not a separating node")
    edge = curve.edge(edge_id)
    cut = curve.graph.copy()
    cut.remove_edge(edge.u, edge.v, key=edge.id)
    side_u = frozenset(nx.node_connected_component(cut, edge.u))
    side_v = curve.full - side_u
    return (Tail(side_u, edge.id, edge.u, edge.v), Tail(side_v, edge.id, edge.v, edge.u))


def all_tails(curve: Curve) -> List[Tail]:
    """Every tail, two per bridge, bridges in edge order"""
    result = []
    for bridge in bridges_in_order(curve):
        result.extend(tails_of_bridge(curve, bridge))
    return result


def is_tail(curve: Curve, sub) -> bool:
    sub = curve.subcurve(sub)
    if sub == curve.full:
        return False
    return len(curve.crossing_edges(sub)) == 1


def tail_of(curve: Curve, sub) -> Tail:
    """Tail record of a subcurve meeting its complement in one node"""
    sub = curve.subcurve(sub)
    if not is_tail(curve, sub):
        raise StructureError(f"{sorted_vertices(curve, sub)} is not a tail")
    edge = curve.crossing_edges(sub)[0]
    inside = edge.u if edge.u in sub else edge.v
    return Tail(sub, edge.id, inside, edge.other(inside))


def contains_point(curve: Curve, sub, q: PointOnCurve) -> bool:
    """A node lies on a subcurve when at least one endpoint of its edge does"""
    sub = frozenset(sub)
    return bool(curve.point_vertices(q) & sub)


def tails(curve: Curve, through: Optional[PointOnCurve] = None,
          avoiding: Optional[str] = None) -> List[Subcurve]:
    """
    Tails of the curve, optionally filtered

    Args:
        through: keep only tails containing this point
        avoiding: keep only tails not containing this vertex (the base component)
    """
    if avoiding is not None and avoiding not in curve.genera:
        raise StructureError(f"unknown base vertex {avoiding!r}")
    result = []
    for tail in all_tails(curve):
        if through is not None and not contains_point(curve, tail.vertices, through):
            continue
        if avoiding is not None and avoiding in tail.vertices:
            continue
        result.append(tail.vertices)
    return result


@dataclass(frozen=True)
class TailEntry:
    """Small-tail data of one bridge"""
    bridge: str
    tails: Tuple[Subcurve, Subcurve]
    small: Subcurve
    splitting: bool
    choice: Optional[str] = None  # least vertex id of the chosen side, splitting nodes only


@dataclass(frozen=True)
class TailTable:
    """Small tails of a curve, one entry per bridge"""
    curve: Curve
    entries: Tuple[TailEntry, ...] = field(default_factory=tuple)

    def entry(self, bridge: str) -> TailEntry:
        for entry in self.entries:
            if entry.bridge == bridge:
                return entry
        raise StructureError(f"edge {bridge!r} is not a separating node")

    @property
    def small_tails(self) -> List[Subcurve]:
        return [entry.small for entry in self.entries]

    @property
    def splitting_nodes(self) -> List[str]:
        return [entry.bridge for entry in self.entries if entry.splitting]

    @property
    def choices(self) -> Dict[str, str]:
        """Choice tag: splitting node to the least vertex id of its chosen side"""
        return {entry.bridge: entry.choice for entry in self.entries if entry.splitting}

    def containing(self, q: PointOnCurve) -> List[Subcurve]:
        """Small tails containing a point, ordered by inclusion"""
        hits = [z for z in self.small_tails if contains_point(self.curve, z, q)]
        return sorted(hits, key=len)

    def flipped(self) -> "TailTable":
        """Same table with the other side chosen at every splitting node"""
        choice = {}
        for entry in self.entries:
            if entry.splitting:
                other = entry.tails[1] if entry.small == entry.tails[0] else entry.tails[0]
                choice[entry.bridge] = min(other)
        return small_tails(self.curve, choice)


def small_tails(curve: Curve, tie_choice: Optional[Dict[str, str]] = None) -> TailTable:
    """
    Small tail of every bridge

    The smaller-genus side; at a splitting node the side containing the vertex
    named by ``tie_choice``, by default the side with the least vertex id.
    """
    tie_choice = dict(tie_choice or {})
    entries = []
    for bridge in bridges_in_order(curve):
        first, second = tails_of_bridge(curve, bridge)
        g1, g2 = genus_of(curve, first.vertices), genus_of(curve, second.vertices)
        if g1 != g2:
            small = first.vertices if g1 < g2 else second.vertices
            if bridge in tie_choice:
                raise StructureError(f"edge {bridge!r} is not a splitting node")
            entries.append(TailEntry(bridge, (first.vertices, second.vertices), small, False))
            continue

        vertex = tie_choice.pop(bridge, None)
        if vertex is None:
            vertex = min(curve.vertex_ids)
        elif vertex not in curve.genera:
            raise StructureError(f"unknown vertex {vertex!r} in choice for {bridge!r}")
        small = first.vertices if vertex in first.vertices else second.vertices
        entries.append(TailEntry(bridge, (first.vertices, second.vertices), small, True,
                                 min(small)))
        logger.debug("splitting node %s: chose side %s", bridge, sorted(small))

    if tie_choice:
        bridge = sorted(tie_choice)[0]
        raise StructureError(f"edge {bridge!r} is not a splitting node")
    return TailTable(curve, tuple(entries))


def is_spine(curve: Curve, sub) -> bool:
    """Connected subcurve meeting its complement only at separating nodes"""
    sub = curve.subcurve(sub)
    if not curve.is_connected(sub):
        raise StructureError(f"{sorted_vertices(curve, sub)} is not connected")
    bridges = separating_nodes(curve)
    return all(e.id in bridges for e in curve.crossing_edges(sub))


def spines(curve: Curve, max_vertices: int = SPINE_ENUM_MAX_VERTICES) -> List[Subcurve]:
    """All proper spines, by brute force"""
    if len(curve.vertices) > max_vertices:
        raise StructureError(f"spine enumeration limited to {max_vertices} vertices")
    return [sub for sub in proper_subcurves(curve, connected_only=True)
            if is_spine(curve, sub)]


def separating_lines(curve: Curve) -> FrozenSet[str]:
    """Genus-0 components without loops that are spines"""
    lines = set()
    for v in curve.vertex_ids:
        if curve.genera[v] != 0:
            continue
        if any(e.is_loop for e in curve.incident_edges(v)):
            continue
        if is_spine(curve, [v]):
            lines.add(v)
    return frozenset(lines)


@dataclass(frozen=True)
class LineTree:
    """Maximal separating tree of lines with its attachment nodes"""
    vertices: Subcurve
    attachments: Tuple[str, ...]

    @property
    def delta(self) -> int:
        return len(self.attachments)


def maximal_line_trees(curve: Curve) -> List[LineTree]:
    lines = separating_lines(curve)
    if not lines:
        return []
    trees = []
    for component in curve.components(lines):
        attachments = tuple(e.id for e in curve.crossing_edges(component))
        trees.append(LineTree(component, attachments))
    return trees


def basepoint_off_small_tails(curve: Curve, table: TailTable) -> str:
    """
    Component carrying points that lie on no small tail

    The complement-side endpoint of the bridge of a maximal small tail; any
    vertex (the first) when the curve has no tails.
    """
    if not is_gstable(curve):
        raise StructureError("curve is not G-stable")
    candidates = table.small_tails
    if not candidates:
        return curve.vertex_ids[0]
    maximal = [z for z in candidates if not any(z < other for other in candidates)]
    maximal.sort(key=lambda z: (-len(z), sorted_vertices(curve, z)))
    tail = tail_of(curve, maximal[0])
    logger.debug("base component %s off maximal small tail %s", tail.outside, sorted(tail.vertices))
    return tail.outside
