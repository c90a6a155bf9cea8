"""
Graphviz DOT export of dual graphs and contracted image curves
"""
import logging
from typing import List, Tuple

from .abel import GeneralizedCurve
from .curve import Curve, Subcurve, sorted_vertices
from .structure import maximal_line_trees, separating_lines, separating_nodes, small_tails

logger = logging.getLogger(__name__)

NEWLINE = "\\n"  # DOT label line break


def _quote(text: str) -> str:
    return '"' + str(text).replace('"', '\\"') + '"'


def _laminar(curve: Curve, candidates: List[Tuple[str, Subcurve]]) -> List[Tuple[str, Subcurve]]:
    """Keep clusters that are nested or disjoint, largest first"""
    accepted: List[Tuple[str, Subcurve]] = []
    for kind, sub in sorted(candidates, key=lambda c: (-len(c[1]), sorted_vertices(curve, c[1]))):
        if any(sub == other for _, other in accepted):
            continue
        if all(sub <= other or not (sub & other) for _, other in accepted):
            accepted.append((kind, sub))
        else:
            logger.debug("cluster %s %s overlaps a drawn cluster", kind, sorted(sub))
    return accepted


def export_dot(curve: Curve, name: str = "curve") -> str:
    """
    Dual graph as an undirected DOT graph

    Bridges are bold, separating lines are shaded, maximal line trees and
    small tails are drawn as cluster boxes where they nest.
    """
    bridges = separating_nodes(curve)
    lines = separating_lines(curve)
    candidates = [("lines", tree.vertices) for tree in maximal_line_trees(curve)
                  if len(tree.vertices) > 1]
    candidates += [("tail", z) for z in small_tails(curve).small_tails]
    clusters = _laminar(curve, candidates)

    out = [f"graph {_quote(name)} {{", "  node [shape=ellipse];"]
    placed = set()
    counter = [0]

    def vertex_line(vid: str, indent: str) -> str:
        text = f"{vid}{NEWLINE}g={curve.genera[vid]}"
        labels = curve.labels_on(vid)
        if labels:
            text += NEWLINE + ", ".join(labels)
        attrs = [f"label={_quote(text)}"]
        if vid in lines:
            attrs += ["style=filled", "fillcolor=lightgrey"]
        return f"{indent}{_quote(vid)} [{', '.join(attrs)}];"

    def emit(sub: Subcurve, depth: int):
        indent = "  " * depth
        children = [c for c in clusters if c[1] < sub
                    and not any(c[1] < other[1] < sub for other in clusters)]
        for kind, child in children:
            counter[0] += 1
            out.append(f"{indent}subgraph cluster_{counter[0]} {{")
            out.append(f"{indent}  label={_quote(kind + ' ' + ','.join(sorted_vertices(curve, child)))};")
            out.append(f"{indent}  style={'filled' if kind == 'lines' else 'dashed'};")
            if kind == "lines":
                out.append(f"{indent}  color=grey90;")
            emit(child, depth + 1)
            out.append(f"{indent}}}")
        # inner clusters have already claimed their vertices
        for vid in sorted_vertices(curve, sub):
            if vid not in placed:
                placed.add(vid)
                out.append(vertex_line(vid, indent))

    emit(curve.full, 1)

    for edge in curve.edges:
        attrs = [f"label={_quote(edge.id)}"]
        if edge.id in bridges:
            attrs.append("style=bold")
        out.append(f"  {_quote(edge.u)} -- {_quote(edge.v)} [{', '.join(attrs)}];")
    out.append("}")
    return "\n".join(out) + "\n"


def export_image_dot(gc: GeneralizedCurve, name: str = "image") -> str:
    """
    Generalized curve as DOT

    Contracted trees of lines and points with three or more branches are
    star nodes joined to each branch; plain double points are edges.
    """
    out = [f"graph {_quote(name)} {{", "  node [shape=ellipse];"]
    for component, genus in gc.components:
        out.append(f"  {_quote(component)} [label={_quote(f'{component}{NEWLINE}g={genus}')}];")
    for point in gc.points:
        if point.order == 2 and not point.name.startswith("R("):
            (a, _), (b, _) = point.branches
            out.append(f"  {_quote(a)} -- {_quote(b)} [label={_quote(point.name)}];")
            continue
        star = f"pt:{point.name}"
        out.append(f"  {_quote(star)} [shape=star, label={_quote(f'{point.name} ({point.order})')}];")
        for component, symbol in point.branches:
            out.append(f"  {_quote(star)} -- {_quote(component)} [label={_quote(symbol)}];")
    out.append("}")
    return "\n".join(out) + "\n"
