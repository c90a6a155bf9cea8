"""
Semistability, stability and P-quasistability of combinatorial sheaves

Canonical polarization in degree d and Seshadri weight vectors, decided by
an exact-rational scan over every proper subcurve.
"""
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Dict, List, Mapping, Optional, Tuple

from .cache import ReportCache
from .config import DEFAULT_JOBS, VERTEX_CAP
from .curve import (
    Curve,
    Subcurve,
    check_vertex_cap,
    delta,
    genus_of,
    omega_degree,
    proper_subcurves,
    sorted_vertices,
)
from .errors import CurveError, StabilityError
from .sheaf import CombSheaf, chi_on, degree_on, is_simple, sheaf_key, total_degree

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class StabilityContext:
    """
    Polarization data for stability queries

    Attributes:
        curve: the curve the sheaves live on
        degree: total degree d of the sheaves under test
        base: component of the base point, for P-quasistability
        weights: Seshadri weights per vertex, positive and summing to 1
    """
    curve: Curve
    degree: int
    base: Optional[str] = None
    weights: Optional[Mapping[str, Fraction]] = field(default=None, compare=True)

    def __post_init__(self):
        if self.base is not None and self.base not in self.curve.genera:
            raise StabilityError(f"unknown base vertex {self.base!r}")
        if self.weights is not None:
            weights = {v: Fraction(a) for v, a in self.weights.items()}
            if set(weights) != set(self.curve.vertex_ids):
                raise StabilityError("weights must name every vertex exactly once")
            if any(a <= 0 for a in weights.values()):
                raise StabilityError("weights must be positive")
            if sum(weights.values()) != 1:
                raise StabilityError(f"weights sum to {sum(weights.values())}, not 1")
            object.__setattr__(self, "weights", weights)

    @cached_property
    def genus(self) -> int:
        return genus_of(self.curve)

    def with_weights(self, weights: Mapping[str, Fraction]) -> "StabilityContext":
        return StabilityContext(self.curve, self.degree, self.base, weights)

    def key(self) -> str:
        weights = None if self.weights is None else sorted((v, str(a)) for v, a in self.weights.items())
        return f"d={self.degree}|base={self.base}|weights={weights}"


class Classification(Enum):
    STABLE = "stable"
    STRICTLY_SEMISTABLE = "strictly-semistable"
    UNSTABLE = "unstable"


@dataclass
class StabilityReport:
    """
    Outcome of a stability scan

    ``witnesses`` holds every subcurve with zero or negative margin, in
    enumeration order.
    """
    classification: Classification
    witnesses: List[Tuple[Subcurve, Fraction]] = field(default_factory=list)
    p_quasistable: Optional[bool] = None
    simple: bool = True
    mode: str = "canonical"

    @property
    def is_semistable(self) -> bool:
        return self.classification != Classification.UNSTABLE

    @property
    def is_stable(self) -> bool:
        return self.classification == Classification.STABLE

    @property
    def zero_margin(self) -> List[Subcurve]:
        return [sub for sub, value in self.witnesses if value == 0]

    @property
    def negative(self) -> List[Subcurve]:
        return [sub for sub, value in self.witnesses if value < 0]

    def witness_set(self) -> Dict[Subcurve, Fraction]:
        return dict(self.witnesses)


def _check_admissible(ctx: StabilityContext):
    if ctx.genus == 1 and ctx.degree != 0:
        raise StabilityError("genus 1 polarization only defined in degree 0")


def margin(sheaf: CombSheaf, sub, ctx: StabilityContext) -> Fraction:
    """deg_Y(I) - d*deg_Y(omega)/(2g-2) + delta_Y/2, exactly"""
    _check_admissible(ctx)
    curve = sheaf.curve
    sub = curve.subcurve(sub)
    if sub == curve.full:
        raise StabilityError("margin needs a proper subcurve")
    value = degree_on(sheaf, sub) + Fraction(delta(curve, sub), 2)
    if ctx.genus != 1:
        value -= Fraction(ctx.degree * omega_degree(curve, sub), 2 * ctx.genus - 2)
    return value


def chi_pairing(sheaf: CombSheaf, sub, ctx: StabilityContext) -> int:
    """(2g-2) deg_Y(I) + (g-1) delta_Y - d deg_Y(omega)"""
    g = ctx.genus
    if g < 2:
        raise StabilityError(f"chi pairing needs genus at least 2, got {g}")
    curve = sheaf.curve
    sub = curve.subcurve(sub)
    if sub == curve.full:
        raise StabilityError("chi pairing needs a proper subcurve")
    return ((2 * g - 2) * degree_on(sheaf, sub) + (g - 1) * delta(curve, sub)
            - ctx.degree * omega_degree(curve, sub))


def canonical_weights(curve: Curve) -> Dict[str, Fraction]:
    """a_v = deg_v(omega) / (2g - 2)"""
    g = genus_of(curve)
    if g < 2:
        raise StabilityError(f"canonical weights need genus at least 2, got {g}")
    weights = {v: Fraction(omega_degree(curve, [v]), 2 * g - 2) for v in curve.vertex_ids}
    if any(a <= 0 for a in weights.values()):
        raise StabilityError("canonical weights are not positive on a curve that is not G-stable")
    return weights


def seshadri_margin(sheaf: CombSheaf, sub, ctx: StabilityContext) -> Fraction:
    """chi(I_Y) - a_Y chi(I)"""
    if ctx.weights is None:
        raise StabilityError("Seshadri margin needs weights")
    curve = sheaf.curve
    sub = curve.subcurve(sub)
    if sub == curve.full:
        raise StabilityError("Seshadri margin needs a proper subcurve")
    a_y = sum(ctx.weights[v] for v in sub)
    return chi_on(sheaf, sub) - a_y * chi_on(sheaf)


@dataclass(frozen=True)
class _SubcurveRow:
    sub: Subcurve
    mask: int
    omega: int
    delta: int
    chi_structure: int


@lru_cache(maxsize=256)
def _subcurve_table(curve: Curve, connected_only: bool) -> Tuple[_SubcurveRow, ...]:
    rows = []
    for sub in proper_subcurves(curve, connected_only=connected_only):
        mask = 0
        for v in sub:
            mask |= 1 << curve.index[v]
        d = delta(curve, sub)
        g_y = genus_of(curve, sub)
        rows.append(_SubcurveRow(sub, mask, 2 * g_y - 2 + d, d, 1 - g_y))
    return tuple(rows)


def _edge_mask(curve: Curve, edge_id: str) -> int:
    edge = curve.edge(edge_id)
    return (1 << curve.index[edge.u]) | (1 << curve.index[edge.v])


def _scan_rows(sheaf: CombSheaf, ctx: StabilityContext, rows, mode: str) -> List[Tuple[Subcurve, Fraction]]:
    """Nonpositive margins over the given rows"""
    curve = sheaf.curve
    degrees = [sheaf.divisor_degree(v) for v in curve.vertex_ids]
    nonfree_masks = [_edge_mask(curve, e) for e in sheaf.nonfree]
    g, d = ctx.genus, ctx.degree
    chi_total = d + 1 - g
    weights = None
    if mode == "seshadri":
        weights = [ctx.weights[v] for v in curve.vertex_ids]

    found = []
    for row in rows:
        deg = sum(degrees[i] for i in range(len(degrees)) if row.mask >> i & 1)
        deg += sum(1 for m in nonfree_masks if m & row.mask == m)
        if mode == "seshadri":
            a_y = sum(weights[i] for i in range(len(weights)) if row.mask >> i & 1)
            value = deg + row.chi_structure - a_y * chi_total
        elif g == 1:
            value = Fraction(2 * deg + row.delta, 2)
        else:
            # sign test on the integer numerator before building the rational
            numerator = 2 * (2 * g - 2) * deg - 2 * d * row.omega + (2 * g - 2) * row.delta
            if numerator * (2 * g - 2) > 0:
                continue
            value = Fraction(numerator, 2 * (2 * g - 2))
        if value <= 0:
            found.append((row.sub, value))
    return found


def _chunks(rows, jobs: int):
    size = max(1, -(-len(rows) // jobs))
    return [rows[i:i + size] for i in range(0, len(rows), size)]


def _scan(sheaf: CombSheaf, ctx: StabilityContext, connected_only: bool, jobs: int,
          mode: str) -> List[Tuple[Subcurve, Fraction]]:
    try:
        check_vertex_cap(sheaf.curve, VERTEX_CAP)
    except CurveError as exc:
        raise StabilityError(str(exc)) from None
    rows = _subcurve_table(sheaf.curve, connected_only)
    if jobs <= 1 or len(rows) < 2 * jobs:
        return _scan_rows(sheaf, ctx, rows, mode)
    chunks = _chunks(rows, jobs)
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        parts = pool.map(_scan_rows, [sheaf] * len(chunks), [ctx] * len(chunks),
                         chunks, [mode] * len(chunks))
        return [item for part in parts for item in part]


def _report(sheaf: CombSheaf, ctx: StabilityContext, witnesses, mode: str) -> StabilityReport:
    if any(value < 0 for _, value in witnesses):
        classification = Classification.UNSTABLE
    elif witnesses:
        classification = Classification.STRICTLY_SEMISTABLE
    else:
        classification = Classification.STABLE

    p_quasistable = None
    if ctx.base is not None:
        p_quasistable = classification != Classification.UNSTABLE and all(
            ctx.base not in sub for sub, value in witnesses if value == 0)
    return StabilityReport(classification, list(witnesses), p_quasistable,
                           is_simple(sheaf), mode)


def _prepare(sheaf: CombSheaf, ctx: StabilityContext):
    if ctx.curve != sheaf.curve:
        raise StabilityError("context and sheaf live on different curves")
    if total_degree(sheaf) != ctx.degree:
        raise StabilityError(
            f"sheaf has degree {total_degree(sheaf)}, context expects {ctx.degree}")


def classify(sheaf: CombSheaf, ctx: StabilityContext, connected_only: bool = False,
             jobs: int = DEFAULT_JOBS, cache: Optional[ReportCache] = None) -> StabilityReport:
    """
    Canonical stability of a sheaf by brute force over subcurves

    Stable iff every margin is positive, semistable iff none is negative,
    P-quasistable iff semistable and no zero-margin subcurve contains the
    base. With ``connected_only`` only connected subcurves are scanned;
    margins add over disjoint unions, so the verdicts agree with the full
    scan while the witness list keeps connected subcurves only.
    """
    _prepare(sheaf, ctx)
    _check_admissible(ctx)
    mode = "canonical-connected" if connected_only else "canonical"
    key = f"{sheaf_key(sheaf)}|{ctx.key()}"
    if cache is not None:
        hit = cache.get(key, mode)
        if hit is not None:
            return hit

    witnesses = _scan(sheaf, ctx, connected_only, jobs, "canonical")
    report = _report(sheaf, ctx, witnesses, mode)
    logger.debug("classify: %s with %d witnesses", report.classification.value, len(witnesses))
    if cache is not None:
        cache.set(key, report, mode)
    return report


def seshadri_classify(sheaf: CombSheaf, ctx: StabilityContext, connected_only: bool = False,
                      jobs: int = DEFAULT_JOBS, cache: Optional[ReportCache] = None) -> StabilityReport:
    """Seshadri stability: chi(I_Y) >= a_Y chi(I) for every proper Y"""
    if ctx.weights is None:
        raise StabilityError("Seshadri stability needs weights")
    _prepare(sheaf, ctx)
    mode = "seshadri-connected" if connected_only else "seshadri"
    key = f"{sheaf_key(sheaf)}|{ctx.key()}"
    if cache is not None:
        hit = cache.get(key, mode)
        if hit is not None:
            return hit

    witnesses = _scan(sheaf, ctx, connected_only, jobs, "seshadri")
    report = _report(sheaf, ctx, witnesses, mode)
    if cache is not None:
        cache.set(key, report, mode)
    return report


def format_report(report: StabilityReport, curve: Curve, style: str = "text") -> str:
    """Aligned text, or one ``Y=<vertices> margin=<p>/<q>`` line per witness"""
    lines = []
    if style == "lines":
        for sub, value in report.witnesses:
            lines.append(f"Y={','.join(sorted_vertices(curve, sub))} "
                         f"margin={value.numerator}/{value.denominator}")
        return "\n".join(lines)

    lines.append(f"classification: {report.classification.value}")
    if report.p_quasistable is not None:
        lines.append(f"p-quasistable:  {'yes' if report.p_quasistable else 'no'}")
    lines.append(f"simple:         {'yes' if report.simple else 'no'}")
    if report.witnesses:
        lines.append("witnesses:")
        width = max(len(",".join(sorted_vertices(curve, sub))) for sub, _ in report.witnesses)
        for sub, value in report.witnesses:
            name = ",".join(sorted_vertices(curve, sub))
            lines.append(f"  {{{name}}}".ljust(width + 5) + f"margin {value}")
    return "\n".join(lines)
