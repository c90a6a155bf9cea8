"""
Dual-graph model of a connected nodal curve

Components are vertices carrying a genus, nodes are edges (loops and
parallel edges allowed) and labeled smooth points sit on vertices.
"""
import logging
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Tuple, Union

import networkx as nx

from .config import VERTEX_CAP
from .errors import CurveError

logger = logging.getLogger(__name__)

GENERIC_SUFFIX = "#generic"

# A subcurve is a nonempty set of vertex ids of its parent curve
Subcurve = FrozenSet[str]


@dataclass(frozen=True, order=True)
class Branch:
    """Branch of the node ``edge`` on the component ``vertex``"""
    edge: str
    vertex: str
    end: int = 0  # 0/1 for the two branches of a loop, 0 otherwise

    def __str__(self):
        return f"{self.edge}@{self.vertex}" + ("'" if self.end else "")


# Point symbols: smooth-point labels or node branches
Symbol = Union[str, Branch]


@dataclass(frozen=True)
class Smooth:
    """Smooth point ``label`` on component ``vertex``"""
    vertex: str
    label: str

    def __str__(self):
        return self.label


@dataclass(frozen=True)
class Node:
    """The node represented by ``edge``"""
    edge: str

    def __str__(self):
        return f"node:{self.edge}"


PointOnCurve = Union[Smooth, Node]


def generic_label(vertex: str) -> str:
    """Label of the generic smooth point of a vertex"""
    return f"{vertex}{GENERIC_SUFFIX}"


def point_key(q: PointOnCurve) -> Tuple[int, str]:
    """Stable sort key for points"""
    return (1, q.edge) if isinstance(q, Node) else (0, q.label)


@dataclass(frozen=True)
class Vertex:
    id: str
    genus: int = 0


@dataclass(frozen=True)
class Edge:
    id: str
    u: str
    v: str

    @property
    def is_loop(self) -> bool:
        return self.u == self.v

    @property
    def ends(self) -> Tuple[str, str]:
        return (self.u, self.v)

    def other(self, vertex: str) -> str:
        return self.v if vertex == self.u else self.u


@dataclass(frozen=True)
class Curve:
    """
    Genus-weighted dual graph with labeled smooth points

    Immutable after construction. Connectivity is checked by make_curve and
    the file parser; restricted() pieces of a curve may be disconnected.
    """
    vertices: Tuple[Vertex, ...]
    edges: Tuple[Edge, ...] = ()
    points: Tuple[Tuple[str, str], ...] = ()  # (label, vertex)

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", tuple(self.edges))
        object.__setattr__(self, "points", tuple(tuple(p) for p in self.points))
        self._validate()

    def _validate(self):
        if not self.vertices:
            raise CurveError("no vertices")
        seen = set()
        for vertex in self.vertices:
            if vertex.id in seen:
                raise CurveError(f"duplicate vertex id {vertex.id!r}")
            if vertex.genus < 0:
                raise CurveError(f"negative genus on vertex {vertex.id!r}")
            seen.add(vertex.id)
        edge_ids = set()
        for edge in self.edges:
            if edge.id in edge_ids or edge.id in seen:
                raise CurveError(f"duplicate edge id {edge.id!r}")
            for end in edge.ends:
                if end not in seen:
                    raise CurveError(f"edge {edge.id!r} ends on unknown vertex {end!r}")
            edge_ids.add(edge.id)
        labels = set()
        for label, vertex in self.points:
            if label in labels:
                raise CurveError(f"duplicate point label {label!r}")
            if vertex not in seen:
                raise CurveError(f"point {label!r} on unknown vertex {vertex!r}")
            labels.add(label)

    # --- lookups -----------------------------------------------------------

    @cached_property
    def vertex_ids(self) -> Tuple[str, ...]:
        return tuple(v.id for v in self.vertices)

    @cached_property
    def index(self) -> Dict[str, int]:
        """Vertex id to position"""
        return {vid: i for i, vid in enumerate(self.vertex_ids)}

    @cached_property
    def genera(self) -> Dict[str, int]:
        return {v.id: v.genus for v in self.vertices}

    @cached_property
    def edge_map(self) -> Dict[str, Edge]:
        return {e.id: e for e in self.edges}

    @cached_property
    def point_map(self) -> Dict[str, str]:
        return dict(self.points)

    @cached_property
    def full(self) -> Subcurve:
        return frozenset(self.vertex_ids)

    def edge(self, edge_id: str) -> Edge:
        try:
            return self.edge_map[edge_id]
        except KeyError:
            raise CurveError(f"unknown edge {edge_id!r}") from None

    def point_vertex(self, label: str) -> str:
        """Vertex carrying a labeled or generic smooth point"""
        if label in self.point_map:
            return self.point_map[label]
        if label.endswith(GENERIC_SUFFIX):
            vertex = label[: -len(GENERIC_SUFFIX)]
            if vertex in self.genera:
                return vertex
        raise CurveError(f"unknown point {label!r}")

    def has_point(self, label: str) -> bool:
        try:
            self.point_vertex(label)
        except CurveError:
            return False
        return True

    def labels_on(self, vertex: str) -> List[str]:
        return [label for label, v in self.points if v == vertex]

    def incident_edges(self, vertex: str) -> List[Edge]:
        return [e for e in self.edges if vertex in e.ends]

    def valence(self, vertex: str) -> int:
        """Number of edge ends at ``vertex`` (loops count twice)"""
        return sum(e.ends.count(vertex) for e in self.edges)

    def branch(self, edge_id: str, vertex: str) -> Branch:
        edge = self.edge(edge_id)
        if vertex not in edge.ends:
            raise CurveError(f"edge {edge_id!r} does not meet {vertex!r}")
        return Branch(edge_id, vertex, 0)

    def branches(self, edge_id: str) -> Tuple[Branch, Branch]:
        """The two branches of a node, one per edge end"""
        edge = self.edge(edge_id)
        if edge.is_loop:
            return (Branch(edge.id, edge.u, 0), Branch(edge.id, edge.u, 1))
        return (Branch(edge.id, edge.u, 0), Branch(edge.id, edge.v, 0))

    def symbol_vertex(self, symbol: Symbol) -> str:
        """Vertex on which a point symbol lives"""
        if isinstance(symbol, Branch):
            edge = self.edge(symbol.edge)
            if symbol.vertex not in edge.ends or (symbol.end and not edge.is_loop):
                raise CurveError(f"bad branch symbol {symbol}")
            return symbol.vertex
        return self.point_vertex(symbol)

    # --- points ------------------------------------------------------------

    def resolve_point(self, text: str) -> PointOnCurve:
        """
        Parse a point reference

        ``node:<edge>``, ``generic:<vertex>`` or a labeled point.
        """
        if text.startswith("node:"):
            edge = self.edge(text[5:])
            return Node(edge.id)
        if text.startswith("generic:"):
            vertex = text[8:]
            if vertex not in self.genera:
                raise CurveError(f"unknown vertex {vertex!r}")
            return Smooth(vertex, generic_label(vertex))
        if text in self.edge_map and text not in self.point_map:
            return Node(text)
        return Smooth(self.point_vertex(text), text)

    def point_vertices(self, q: PointOnCurve) -> FrozenSet[str]:
        """Components through the point"""
        if isinstance(q, Node):
            return frozenset(self.edge(q.edge).ends)
        if self.point_vertex(q.label) != q.vertex:
            raise CurveError(f"point {q.label!r} is not on {q.vertex!r}")
        return frozenset([q.vertex])

    def point_classes(self) -> List[PointOnCurve]:
        """Generic point of every vertex, every labeled point, every node"""
        classes: List[PointOnCurve] = [Smooth(v, generic_label(v)) for v in self.vertex_ids]
        classes.extend(Smooth(v, label) for label, v in self.points)
        classes.extend(Node(e.id) for e in self.edges)
        return classes

    # --- subcurves -------------------------------------------------------

    def subcurve(self, vertices: Iterable[str]) -> Subcurve:
        sub = frozenset(vertices)
        if not sub:
            raise CurveError("empty subcurve")
        unknown = sub - self.full
        if unknown:
            raise CurveError(f"unknown vertices {sorted(unknown)}")
        return sub

    def complement(self, sub: Iterable[str]) -> Subcurve:
        return self.full - frozenset(sub)

    def internal_edges(self, sub: Iterable[str]) -> List[Edge]:
        sub = frozenset(sub)
        return [e for e in self.edges if e.u in sub and e.v in sub]

    def crossing_edges(self, sub: Iterable[str]) -> List[Edge]:
        sub = frozenset(sub)
        return [e for e in self.edges if (e.u in sub) != (e.v in sub)]

    @cached_property
    def graph(self) -> nx.MultiGraph:
        """Underlying multigraph, edge keys are edge ids"""
        graph = nx.MultiGraph()
        graph.add_nodes_from(self.vertex_ids)
        for e in self.edges:
            graph.add_edge(e.u, e.v, key=e.id)
        return graph

    def components(self, sub: Optional[Iterable[str]] = None) -> List[Subcurve]:
        """Connected components of the induced subgraph, in vertex order"""
        sub = self.full if sub is None else frozenset(sub)
        induced = self.graph.subgraph(sub)
        parts = [frozenset(c) for c in nx.connected_components(induced)]
        return sorted(parts, key=lambda c: min(self.index[v] for v in c))

    def is_connected(self, sub: Optional[Iterable[str]] = None) -> bool:
        return len(self.components(sub)) == 1

    def restricted(self, sub: Iterable[str]) -> "Curve":
        """
        Piece curve of a subcurve

        Induced vertices and internal edges; every crossing node becomes a
        smooth labeled point ``"<edge>@<vertex>"`` on its inside endpoint.
        """
        sub = self.subcurve(sub)
        vertices = [v for v in self.vertices if v.id in sub]
        points = [(label, v) for label, v in self.points if v in sub]
        for e in self.crossing_edges(sub):
            inside = e.u if e.u in sub else e.v
            points.append((str(Branch(e.id, inside)), inside))
        return Curve(tuple(vertices), tuple(self.internal_edges(sub)), tuple(points))

    def describe(self) -> str:
        return f"Curve(V={len(self.vertices)}, E={len(self.edges)}, g={genus_of(self)})"


def make_curve(vertices: Iterable, edges: Iterable = (), points: Iterable = ()) -> Curve:
    """
    Build a validated connected curve

    Args:
        vertices: (id, genus) pairs or Vertex objects
        edges: (id, u, v) triples or Edge objects
        points: (label, vertex) pairs
    """
    curve = Curve(
        tuple(v if isinstance(v, Vertex) else Vertex(*v) for v in vertices),
        tuple(e if isinstance(e, Edge) else Edge(*e) for e in edges),
        tuple(points),
    )
    if not curve.is_connected():
        raise CurveError("underlying graph is not connected")
    return curve


def _nonempty(curve: Curve, sub: Optional[Iterable[str]]) -> Subcurve:
    return curve.full if sub is None else curve.subcurve(sub)


def _proper(curve: Curve, sub: Iterable[str]) -> Subcurve:
    sub = curve.subcurve(sub)
    if sub == curve.full:
        raise CurveError("subcurve must be proper")
    return sub


def chi_structure(curve: Curve, sub: Optional[Iterable[str]] = None) -> int:
    """Euler characteristic of the structure sheaf of a subcurve"""
    sub = _nonempty(curve, sub)
    return len(sub) - len(curve.internal_edges(sub)) - sum(curve.genera[v] for v in sub)


def genus_of(curve: Curve, sub: Optional[Iterable[str]] = None) -> int:
    """Arithmetic genus 1 - chi(O_Y); the whole curve when ``sub`` is None"""
    return 1 - chi_structure(curve, sub)


def delta(curve: Curve, sub: Iterable[str]) -> int:
    """Number of nodes joining a proper subcurve to its complement"""
    return len(curve.crossing_edges(_proper(curve, sub)))


def omega_degree(curve: Curve, sub: Optional[Iterable[str]] = None) -> int:
    """Degree of the dualizing sheaf on a subcurve: 2g_Y - 2 + delta_Y"""
    sub = _nonempty(curve, sub)
    crossing = 0 if sub == curve.full else len(curve.crossing_edges(sub))
    return 2 * genus_of(curve, sub) - 2 + crossing


def is_gstable(curve: Curve) -> bool:
    """Genus at least 2 and the dualizing sheaf has positive degree on every component"""
    if genus_of(curve) < 2:
        return False
    return all(omega_degree(curve, [v]) > 0 for v in curve.vertex_ids)


def check_vertex_cap(curve: Curve, cap: int = VERTEX_CAP):
    if len(curve.vertices) > cap:
        raise CurveError(
            f"{len(curve.vertices)} vertices exceeds the enumeration cap of {cap}")


def proper_subcurves(curve: Curve, connected_only: bool = False,
                     cap: int = VERTEX_CAP) -> Iterator[Subcurve]:
    """
    All proper nonempty subcurves

    Ordered by increasing size, lexicographically (in vertex order) within a size.
    """
    check_vertex_cap(curve, cap)
    ids = curve.vertex_ids
    for size in range(1, len(ids)):
        for combo in combinations(ids, size):
            sub = frozenset(combo)
            if connected_only and not curve.is_connected(sub):
                continue
            yield sub


def sorted_vertices(curve: Curve, sub: Iterable[str]) -> List[str]:
    return sorted(sub, key=curve.index.__getitem__)
