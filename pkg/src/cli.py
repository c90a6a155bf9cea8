"""
Command-line front end

    python -m src.cli analyze fixtures/fix_a.curve
    python -m src.cli abel fixtures/fix_b.curve --degree 1 --at node:e --choice e=v1
    python -m src.cli verify --random --suite gstable

Exit codes: 0 success, 1 theorem-suite violation, 2 input error.
"""
import argparse
import logging
import re
import sys
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, NamedTuple, Optional, Sequence

import numpy as np

from .abel import (
    abel0,
    abel1,
    base_vertex,
    fiber_partition,
    gen_genus,
    image_curve,
    point_classes,
    resolve_base,
)
from .cache import ReportCache
from .config import DEFAULT_JOBS, DEFAULT_SEED, LOG_LEVEL, RANDOM_CURVES, RANDOM_GSTABLE_CURVES, SESHADRI_TRIPLES
from .curve import (
    GENERIC_SUFFIX,
    Branch,
    Curve,
    Edge,
    Symbol,
    Vertex,
    generic_label,
    genus_of,
    is_gstable,
    omega_degree,
    sorted_vertices,
)
from .dot import export_dot, export_image_dot
from .errors import CurveFormatError, NodalCurveError
from .generator import random_curve
from .sequiv import collapse_analysis, s_equivalent, s_invariants
from .sheaf import CombSheaf, format_sheaf, line_bundle, make_sheaf, multidegree, total_degree
from .stability import StabilityContext, classify, format_report, seshadri_classify
from .structure import maximal_line_trees, separating_lines, separating_nodes, small_tails
from .theorems import SUITES, TheoremSuite


logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_INPUT = 2

_COMMENT = re.compile(r"(^|\s)#.*$")
_ID = re.compile(r"^[A-Za-z0-9_.'\-]+$")


class ParsedCurve(NamedTuple):
    curve: Curve
    base: Optional[str]
    points: List[str]


# --- curve files -----------------------------------------------------------

def parse_curve_text(text: str) -> ParsedCurve:
    """
    Parse the curve text format

        vertex <id> genus=<n>
        edge <id> <vid> <vid>
        point <label> on <vid>
        base <label-or-edge-id>

    '#' starts a comment when it begins a line or follows whitespace.
    """
    vertices: List[Vertex] = []
    edges: List[tuple] = []
    points: List[tuple] = []
    base = None
    seen: Dict[str, int] = {}

    def declare(name: str, kind: str, line_no: int):
        if not _ID.match(name):
            raise CurveFormatError(f"invalid {kind} id {name!r}", line_no)
        if name in seen:
            raise CurveFormatError(f"duplicate id {name!r} (first declared on line {seen[name]})", line_no)
        seen[name] = line_no

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = _COMMENT.sub("", raw).strip()
        if not line:
            continue
        words = line.split()
        keyword = words[0]

        if keyword == "vertex":
            if len(words) not in (2, 3):
                raise CurveFormatError("expected: vertex <id> genus=<n>", line_no)
            genus = 0
            if len(words) == 3:
                match = re.fullmatch(r"genus=(-?\d+)", words[2])
                if not match:
                    raise CurveFormatError(f"bad genus field {words[2]!r}", line_no)
                genus = int(match.group(1))
                if genus < 0:
                    raise CurveFormatError(f"negative genus on {words[1]!r}", line_no)
            declare(words[1], "vertex", line_no)
            vertices.append(Vertex(words[1], genus))
        elif keyword == "edge":
            if len(words) != 4:
                raise CurveFormatError("expected: edge <id> <vid> <vid>", line_no)
            declare(words[1], "edge", line_no)
            edges.append((line_no, words[1], words[2], words[3]))
        elif keyword == "point":
            if len(words) != 4 or words[2] != "on":
                raise CurveFormatError("expected: point <label> on <vid>", line_no)
            label = words[1]
            if "@" in label or label.endswith(GENERIC_SUFFIX):
                raise CurveFormatError(f"reserved point label {label!r}", line_no)
            declare(label, "point", line_no)
            points.append((line_no, label, words[3]))
        elif keyword == "base":
            if len(words) != 2:
                raise CurveFormatError("expected: base <label-or-edge-id>", line_no)
            if base is not None:
                raise CurveFormatError("base point declared twice", line_no)
            base = (line_no, words[1])
        else:
            raise CurveFormatError(f"unknown declaration {keyword!r}", line_no)

    if not vertices:
        raise CurveFormatError("no vertices")
    ids = {v.id for v in vertices}
    for line_no, eid, u, v in edges:
        for end in (u, v):
            if end not in ids:
                raise CurveFormatError(f"edge {eid!r} has unknown endpoint {end!r}", line_no)
    for line_no, label, v in points:
        if v not in ids:
            raise CurveFormatError(f"point {label!r} on unknown vertex {v!r}", line_no)

    curve = Curve(tuple(vertices), tuple(Edge(e, u, v) for _, e, u, v in edges),
                  tuple((label, v) for _, label, v in points))
    if not curve.is_connected():
        raise CurveFormatError("underlying graph is not connected")

    base_label = None
    if base is not None:
        line_no, base_label = base
        try:
            curve.resolve_point(base_label)
        except NodalCurveError as exc:
            raise CurveFormatError(f"bad base point: {exc}", line_no) from None
    return ParsedCurve(curve, base_label, [label for _, label, _ in points])


def parse_curve_file(path) -> ParsedCurve:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CurveFormatError(f"cannot read {path}: {exc.strerror}") from None
    return parse_curve_text(text)


def format_curve(curve: Curve, base: Optional[str] = None) -> str:
    """Curve file text; parse_curve_text inverts it"""
    lines = [f"vertex {v.id} genus={v.genus}" for v in curve.vertices]
    lines += [f"edge {e.id} {e.u} {e.v}" for e in curve.edges]
    lines += [f"point {label} on {v}" for label, v in curve.points]
    if base is not None:
        lines.append(f"base {base}")
    return "\n".join(lines) + "\n"


# --- option parsing --------------------------------------------------------

def parse_choice(values: Optional[Sequence[str]]) -> Dict[str, str]:
    choice = {}
    for value in values or []:
        bridge, sep, vertex = value.partition("=")
        if not sep or not bridge or not vertex:
            raise argparse.ArgumentTypeError(f"choice must look like <bridge>=<vertex>, got {value!r}")
        choice[bridge] = vertex
    return choice


def parse_weights(text: str) -> Dict[str, Fraction]:
    """
    ``v1=1/3,v2=2/3``; ``:`` is accepted in place of ``=``

    A leading ``a=`` before the first pair, as in ``a=v1:1/3,v2:2/3``, is
    dropped. ``a=1/2,b=1/2`` still names a vertex ``a``.
    """
    text = text.strip()
    if re.match(r"a=[^,=:\s]+\s*[=:]", text):
        text = text[2:]
    weights = {}
    for item in text.split(","):
        item = item.strip()
        match = re.fullmatch(r"([^=:\s]+)\s*[=:]\s*(-?\d+(?:/\d+)?)", item)
        if not match:
            raise argparse.ArgumentTypeError(f"bad weight {item!r}")
        try:
            weights[match.group(1)] = Fraction(match.group(2))
        except ZeroDivisionError:
            raise argparse.ArgumentTypeError(f"bad weight {item!r}") from None
    return weights


def _symbol(text: str) -> Symbol:
    """``e@v`` (``e@v'`` for the second branch of a loop), ``generic:<v>`` or a label"""
    if "@" in text:
        edge, _, vertex = text.partition("@")
        end = 1 if vertex.endswith("'") else 0
        return Branch(edge, vertex.rstrip("'"), end)
    if text.startswith("generic:"):
        return generic_label(text[8:])
    return text


def parse_divisor(text: str) -> Dict[Symbol, int]:
    """``P=1,Q=-1,e1@X1=-1``"""
    terms: Dict[Symbol, int] = {}
    for item in text.split(","):
        label, sep, value = item.strip().partition("=")
        if not sep or not label.strip() or not re.fullmatch(r"-?\d+", value.strip()):
            raise argparse.ArgumentTypeError(f"bad divisor term {item!r}")
        symbol = _symbol(label.strip())
        terms[symbol] = terms.get(symbol, 0) + int(value)
    return terms


# --- commands --------------------------------------------------------------

def _load(args) -> ParsedCurve:
    if getattr(args, "random", False) and not getattr(args, "curve", None):
        curve = random_curve(np.random.default_rng(args.seed))
        return ParsedCurve(curve, None, [label for label, _ in curve.points])
    if not getattr(args, "curve", None):
        raise CurveFormatError("no curve file given")
    return parse_curve_file(args.curve)


def _base_label(parsed: ParsedCurve, args) -> str:
    return args.base or parsed.base or generic_label(parsed.curve.vertex_ids[0])


def cmd_analyze(args) -> int:
    parsed = _load(args)
    curve = parsed.curve
    if args.format == "dot":
        print(export_dot(curve), end="")
        return EXIT_OK

    bridges = separating_nodes(curve)
    table = small_tails(curve, parse_choice(args.choice))
    if args.format == "lines":
        print(f"genus={genus_of(curve)}")
        print(f"gstable={'yes' if is_gstable(curve) else 'no'}")
        print(f"bridges={','.join(e.id for e in curve.edges if e.id in bridges)}")
        for entry in table.entries:
            print(f"small_tail {entry.bridge}={','.join(sorted_vertices(curve, entry.small))}"
                  + (" splitting" if entry.splitting else ""))
        print(f"lines={','.join(sorted_vertices(curve, separating_lines(curve)))}")
        return EXIT_OK

    print(curve.describe())
    print(f"genus:            {genus_of(curve)}")
    print(f"G-stable:         {'yes' if is_gstable(curve) else 'no'}")
    print("components:")
    for v in curve.vertices:
        labels = curve.labels_on(v.id)
        print(f"  {v.id}: genus={v.genus} valence={curve.valence(v.id)} "
              f"omega={omega_degree(curve, [v.id])}"
              + (f" points={','.join(labels)}" if labels else ""))
    print(f"separating nodes: {', '.join(e.id for e in curve.edges if e.id in bridges) or 'none'}")
    if table.entries:
        print("small tails:")
        for entry in table.entries:
            note = f" (splitting, choice {entry.choice})" if entry.splitting else ""
            print(f"  {entry.bridge}: {{{','.join(sorted_vertices(curve, entry.small))}}}{note}")
    lines = separating_lines(curve)
    print(f"separating lines: {', '.join(sorted_vertices(curve, lines)) if lines else 'none'}")
    for tree in maximal_line_trees(curve):
        print(f"  line tree {{{','.join(sorted_vertices(curve, tree.vertices))}}} "
              f"delta={tree.delta} attachments={','.join(tree.attachments)}")
    if parsed.base:
        print(f"base point:       {parsed.base}")
    return EXIT_OK


def _sheaf_for(parsed: ParsedCurve, args) -> CombSheaf:
    """Sheaf named by --divisor/--nonfree, else the Abel sheaf at --at, else O(d*P)"""
    curve = parsed.curve
    if args.divisor or args.nonfree:
        divisor = parse_divisor(args.divisor) if args.divisor else {}
        nonfree = [e for e in (args.nonfree or "").split(",") if e]
        return make_sheaf(curve, divisor, nonfree)
    if args.at:
        return _abel_sheaf(parsed, args, curve.resolve_point(args.at))
    p = resolve_base(curve, _base_label(parsed, args))
    return line_bundle(curve, {p.label: args.degree} if args.degree else {})


def _abel_sheaf(parsed: ParsedCurve, args, q) -> CombSheaf:
    curve = parsed.curve
    if args.degree == 0:
        return abel0(curve, _base_label(parsed, args), q)
    if args.degree == 1:
        return abel1(curve, small_tails(curve, parse_choice(args.choice)), q)
    raise CurveFormatError(f"Abel maps exist in degrees 0 and 1, not {args.degree}")


def _context(parsed: ParsedCurve, args, degree: int) -> StabilityContext:
    return StabilityContext(parsed.curve, degree, base_vertex(parsed.curve, _base_label(parsed, args)))


def cmd_stability(args) -> int:
    parsed = _load(args)
    curve = parsed.curve
    sheaf = _sheaf_for(parsed, args)
    degree = total_degree(sheaf) if args.divisor or args.nonfree else args.degree
    if degree == 1 and not is_gstable(curve):
        print("note: curve is not G-stable; degree-1 checks computed anyway")
    ctx = _context(parsed, args, degree)
    if args.weights:
        report = seshadri_classify(sheaf, ctx.with_weights(parse_weights(args.weights)), jobs=args.jobs)
    else:
        report = classify(sheaf, ctx, connected_only=args.connected_only, jobs=args.jobs)

    if args.format == "lines":
        output = format_report(report, curve, style="lines")
        if output:
            print(output)
        return EXIT_OK
    print(format_sheaf(sheaf))
    print(format_report(report, curve))
    return EXIT_OK


def cmd_abel(args) -> int:
    parsed = _load(args)
    curve = parsed.curve
    if args.degree == 1 and not is_gstable(curve):
        print("note: curve is not G-stable")
    targets = point_classes(curve) if args.at in (None, "all") else [curve.resolve_point(args.at)]
    ctx = _context(parsed, args, args.degree)
    for q in targets:
        sheaf = _abel_sheaf(parsed, args, q)
        report = classify(sheaf, ctx, jobs=args.jobs)
        if args.format == "lines":
            degrees = ",".join(str(d) for d in multidegree(sheaf))
            print(f"Q={q} multidegree=({degrees}) {report.classification.value}")
            continue
        print(f"Q = {q}")
        print(format_sheaf(sheaf))
        print(format_report(report, curve))
        print()
    return EXIT_OK


def cmd_image(args) -> int:
    parsed = _load(args)
    curve = parsed.curve
    image = image_curve(curve)
    if args.format == "dot":
        print(export_image_dot(image), end="")
        return EXIT_OK
    if args.format == "lines":
        print(f"genus={genus_of(curve)} gen_genus={gen_genus(image)}")
        return EXIT_OK
    print(image.describe())
    print(f"genus of curve:       {genus_of(curve)}")
    print(f"genus of image curve: {gen_genus(image)}")
    print("fibers:")
    for block in fiber_partition(curve):
        if len(block) > 1:
            print(f"  {{{', '.join(sorted(str(q) for q in block))}}}")
    return EXIT_OK


def cmd_sequiv(args) -> int:
    parsed = _load(args)
    curve = parsed.curve
    cache = ReportCache()
    ctx = _context(parsed, args, args.degree)
    table = small_tails(curve, parse_choice(args.choice))

    sheaves = []
    for text in args.at or []:
        sheaf = _abel_sheaf(parsed, args, curve.resolve_point(text))
        sclass = s_invariants(sheaf, ctx, cache=cache)
        sheaves.append(sheaf)
        print(f"Q = {text}")
        print("  parts: " + " | ".join(",".join(sorted_vertices(curve, p)) for p in sclass.parts))
        for part, piece in sclass.gr:
            print(f"  gr on {{{','.join(sorted_vertices(curve, part))}}}:")
            for row in format_sheaf(piece).splitlines():
                print(f"    {row}")
    if len(sheaves) == 2:
        verdict = s_equivalent(sheaves[0], sheaves[1], ctx, cache=cache)
        print(f"s-equivalent: {'undecided' if verdict is None else ('yes' if verdict else 'no')}")

    if genus_of(curve) == 0:
        return EXIT_OK
    if args.degree == 1 and not is_gstable(curve):
        print("note: curve is not G-stable; degree-1 collapse analysis skipped")
        return EXIT_OK
    base = None if args.degree == 1 and not args.base else _base_label(parsed, args)
    report = collapse_analysis(curve, args.degree, base=base, table=table, cache=cache)
    print(f"collapse at degree {report.degree}: {len(report.blocks)} fiber blocks, "
          f"{len(report.classes)} S-classes")
    for cls in report.classes:
        if len(cls) > 1:
            print("  merged: " + ", ".join(str(report.representative(i)) for i in cls))
    for i, j in report.unknown_pairs:
        print(f"  undecided: {report.representative(i)} ~ {report.representative(j)}")
    for violation in report.violations:
        print(f"  violation: {violation}")
    return EXIT_OK if report.ok else EXIT_VIOLATION


def cmd_verify(args) -> int:
    suite = TheoremSuite(cache=ReportCache(), seed=args.seed, verbose=args.verbose)
    for path in args.curves:
        parsed = parse_curve_file(path)
        suite.check_curve(parsed.curve, str(path))
        print(f"✓ Checked {path}")
    if args.random or not args.curves:
        suites = SUITES if args.suite == "all" else (args.suite,)
        suite.run_corpus(args.seed, args.count, args.gstable_count, args.seshadri_count, suites)
    print(suite.summary())
    return EXIT_OK if suite.ok else EXIT_VIOLATION


def cmd_export_dot(args) -> int:
    parsed = _load(args)
    if args.image:
        print(export_image_dot(image_curve(parsed.curve)), end="")
    else:
        print(export_dot(parsed.curve), end="")
    return EXIT_OK


# --- entry point -----------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nodal-abel",
        description="Abel maps, twisters and stability on dual graphs of nodal curves.",
    )
    parser.add_argument("--log-level", default=LOG_LEVEL, help="root log level")
    sub = parser.add_subparsers(dest="command", required=True)

    def curve_command(name: str, help_text: str, formats=("text", "lines")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("curve", nargs="?", help="curve file")
        p.add_argument("--random", action="store_true", help="use a random curve drawn with --seed")
        p.add_argument("--seed", type=int, default=DEFAULT_SEED)
        p.add_argument("--base", help="base point label or generic:<vertex>")
        p.add_argument("--choice", action="append", metavar="BRIDGE=VERTEX",
                       help="side of a splitting node for the small tail")
        p.add_argument("--jobs", type=int, default=DEFAULT_JOBS)
        p.add_argument("--format", choices=formats, default="text")
        return p

    p = curve_command("analyze", "separating structure of a curve", ("text", "lines", "dot"))
    p.set_defaults(func=cmd_analyze)

    p = curve_command("stability", "stability of a sheaf")
    p.add_argument("--degree", type=int, default=0)
    p.add_argument("--at", help="use the Abel sheaf at this point")
    p.add_argument("--divisor", help="explicit divisor, e.g. P=1,Q=-1")
    p.add_argument("--nonfree", help="comma separated nodes where the sheaf is not free")
    p.add_argument("--weights", help="Seshadri weights, e.g. v1=1/3,v2=2/3")
    p.add_argument("--connected-only", action="store_true")
    p.set_defaults(func=cmd_stability)

    p = curve_command("abel", "Abel sheaves of degree 0 or 1")
    p.add_argument("--degree", type=int, choices=(0, 1), default=0)
    p.add_argument("--at", help="node:<e>, generic:<v>, a label, or 'all'")
    p.set_defaults(func=cmd_abel)

    p = curve_command("image", "image curve of the degree-0 Abel map", ("text", "lines", "dot"))
    p.set_defaults(func=cmd_image)

    p = curve_command("sequiv", "Jordan-Hölder data and collapse of Abel images")
    p.add_argument("--degree", type=int, choices=(0, 1), default=0)
    p.add_argument("--at", action="append", help="point whose S-class is printed (repeatable)")
    p.set_defaults(func=cmd_sequiv)

    p = sub.add_parser("verify", help="run the theorem suite")
    p.add_argument("curves", nargs="*", help="curve files to check")
    p.add_argument("--random", action="store_true", help="also check the seeded random corpora")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--count", type=int, default=RANDOM_CURVES)
    p.add_argument("--gstable-count", type=int, default=RANDOM_GSTABLE_CURVES)
    p.add_argument("--seshadri-count", type=int, default=SESHADRI_TRIPLES)
    p.add_argument("--suite", choices=("all",) + SUITES, default="all",
                   help="run one corpus suite on its own (default: all)")
    p.add_argument("--verbose", action="store_true")
    p.set_defaults(func=cmd_verify)

    p = curve_command("export-dot", "DOT of the dual graph or its image", ("dot",))
    p.add_argument("--image", action="store_true", help="export the image curve instead")
    p.set_defaults(func=cmd_export_dot)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(level=args.log_level.upper(), format="%(levelname)s %(name)s: %(message)s")

    try:
        return args.func(args)
    except argparse.ArgumentTypeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NodalCurveError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
