"""
Theorem suite - checks every structural property on fixtures and random corpora
Driver behind the ``verify`` command
"""
import logging
import time
from dataclasses import dataclass
from itertools import combinations
from typing import Callable, List, Optional, Sequence

import numpy as np

from .abel import (
    abel0,
    abel1,
    fiber_block_of,
    fiber_partition,
    gen_genus,
    image_curve,
    point_classes,
    verify_restriction,
)
from .cache import ReportCache
from .config import (
    DEFAULT_SEED,
    JH_EXHAUSTIVE_MAX_VERTICES,
    RANDOM_CURVES,
    RANDOM_GSTABLE_CURVES,
    SESHADRI_TRIPLES,
    SPINE_ENUM_MAX_VERTICES,
)
from .curve import (
    Curve,
    Node,
    delta,
    generic_label,
    genus_of,
    is_gstable,
    omega_degree,
    proper_subcurves,
    sorted_vertices,
)
from .errors import NodalCurveError
from .generator import random_corpus, random_gstable_corpus, random_sheaf
from .sequiv import (
    all_jh_filtrations,
    collapse_analysis,
    compare_sclasses,
    degree_one_violation,
    s_equivalent,
    s_invariants,
)
from .sheaf import (
    IsoVerdict,
    degree_on,
    dual,
    ideal_sheaf,
    inverse,
    is_simple,
    iso_witness,
    line_bundle,
    tensor,
    total_degree,
    twister,
)
from .stability import (
    Classification,
    StabilityContext,
    canonical_weights,
    chi_pairing,
    classify,
    margin,
    seshadri_classify,
)
from .structure import (
    all_tails,
    basepoint_off_small_tails,
    separating_lines,
    separating_nodes,
    small_tails,
    spines,
)

logger = logging.getLogger(__name__)

SUITES = ("connected", "gstable", "seshadri")


@dataclass
class Violation:
    """A property that failed on a specific curve"""
    check: str
    curve: str
    detail: str

    def __str__(self):
        return f"[{self.check}] {self.curve}: {self.detail}"


def _sign(x) -> int:
    return (x > 0) - (x < 0)


class TheoremSuite:
    """
    Runs the property checks and collects violations

    Features:
    - Per-curve checks for curve, structure, sheaf, stability, Abel and S-equivalence properties
    - Seeded random corpora for reproducible failures
    - Shared report cache across all stability scans
    """

    def __init__(self, cache: Optional[ReportCache] = None, seed: int = DEFAULT_SEED,
                 verbose: bool = False):
        self.cache = cache if cache is not None else ReportCache()
        self.rng = np.random.default_rng(seed)
        self.verbose = verbose
        self.violations: List[Violation] = []
        self.curves_checked = 0
        self.checks_run = 0

    # --- bookkeeping --------------------------------------------------------

    def _fail(self, check: str, label: str, detail: str):
        violation = Violation(check, label, detail)
        logger.warning("violation %s", violation)
        self.violations.append(violation)

    def _run(self, check: str, label: str, fn: Callable[[], None]):
        self.checks_run += 1
        try:
            fn()
        except NodalCurveError as exc:
            self._fail(check, label, f"raised {type(exc).__name__}: {exc}")

    # --- entry points --------------------------------------------------------

    def check_curve(self, curve: Curve, label: str = "curve",
                    degree_one_only: bool = False) -> List[Violation]:
        """
        Run every applicable check on one curve; returns the new violations

        With ``degree_one_only`` only the tail, degree-1 Abel and collapse
        checks run, which is all the G-stable corpus adds over the connected one.
        """
        before = len(self.violations)
        self.curves_checked += 1
        g = genus_of(curve)

        if degree_one_only:
            self._run("tails", label, lambda: self._check_tails(curve, label))
        else:
            self._run("euler", label, lambda: self._check_euler(curve, label))
            self._run("lemma-g0", label, lambda: self._check_genus_zero(curve, label))
            self._run("tails", label, lambda: self._check_tails(curve, label))
            self._run("sheaf", label, lambda: self._check_sheaf_identities(curve, label))
            self._run("twister-bound", label, lambda: self._check_twister_bound(curve, label))
            self._run("stability", label, lambda: self._check_stability(curve, label))
            self._run("abel0", label, lambda: self._check_abel0(curve, label))
            if g > 0:
                self._run("fibers", label, lambda: self._check_fibers(curve, label))
                self._run("image", label, lambda: self._check_image(curve, label))
            if len(curve.vertices) <= SPINE_ENUM_MAX_VERTICES:
                self._run("restriction", label, lambda: self._check_restrictions(curve, label))
            if len(curve.vertices) <= JH_EXHAUSTIVE_MAX_VERTICES:
                self._run("jordan-holder", label, lambda: self._check_jh(curve, label))
        if is_gstable(curve):
            self._run("abel1", label, lambda: self._check_abel1(curve, label))
            self._run("collapse", label, lambda: self._check_collapse(curve, label))
        return self.violations[before:]

    def check_seshadri_triple(self, curve: Curve, label: str = "curve"):
        """Canonical weights reproduce canonical stability on a random sheaf"""
        def run():
            degree = int(self.rng.integers(-2, 4))
            sheaf = random_sheaf(self.rng, curve, degree)
            ctx = StabilityContext(curve, degree)
            canonical = classify(sheaf, ctx, cache=self.cache)
            seshadri = seshadri_classify(sheaf, ctx.with_weights(canonical_weights(curve)),
                                         cache=self.cache)
            if canonical.classification != seshadri.classification:
                self._fail("seshadri", label, f"classifications differ at d={degree}")
            if canonical.witness_set() != seshadri.witness_set():
                self._fail("seshadri", label, f"witness sets differ at d={degree}")
        self._run("seshadri", label, run)

    def run_corpus(self, seed: int = DEFAULT_SEED, count: int = RANDOM_CURVES,
                   gstable_count: int = RANDOM_GSTABLE_CURVES,
                   seshadri_count: int = SESHADRI_TRIPLES,
                   suites: Sequence[str] = SUITES) -> List[Violation]:
        """
        Check the seeded corpora

        ``suites`` picks any of ``connected``, ``gstable`` and ``seshadri``;
        each runs and is timed on its own.
        """
        unknown = set(suites) - set(SUITES)
        if unknown:
            raise ValueError(f"unknown suites: {sorted(unknown)}")

        print("Initializing theorem suite...")
        print(f"  Seed: {seed}")

        if "connected" in suites:
            started = time.perf_counter()
            print(f"  Checking {count} random connected curves...")
            for i, curve in enumerate(random_corpus(seed, count)):
                self.check_curve(curve, f"connected seed={seed} #{i}")
                if self.verbose and (i + 1) % 50 == 0:
                    print(f"    {i + 1}/{count}")
            print(f"✓ Connected corpus done in {time.perf_counter() - started:.1f}s "
                  f"({len(self.violations)} violations so far)")

        gstable = []
        if "gstable" in suites or ("seshadri" in suites and seshadri_count):
            gstable = random_gstable_corpus(seed + 1, gstable_count)

        if "gstable" in suites:
            started = time.perf_counter()
            print(f"  Checking {gstable_count} random G-stable curves...")
            for i, curve in enumerate(gstable):
                self.check_curve(curve, f"gstable seed={seed + 1} #{i}", degree_one_only=True)
            print(f"✓ G-stable corpus done in {time.perf_counter() - started:.1f}s "
                  f"({len(self.violations)} violations so far)")

        if "seshadri" in suites and gstable and seshadri_count:
            started = time.perf_counter()
            print(f"  Comparing canonical and Seshadri stability on {seshadri_count} triples...")
            for i in range(seshadri_count):
                curve = gstable[i % len(gstable)]
                self.check_seshadri_triple(curve, f"seshadri seed={seed + 1} #{i % len(gstable)}")
            print(f"✓ Seshadri comparison done in {time.perf_counter() - started:.1f}s")

        print(f"  Cache: {self.cache}")
        return self.violations

    @property
    def ok(self) -> bool:
        return not self.violations

    def summary(self) -> str:
        lines = [f"curves checked: {self.curves_checked}",
                 f"checks run:     {self.checks_run}",
                 f"violations:     {len(self.violations)}"]
        lines += [f"  {v}" for v in self.violations[:50]]
        if len(self.violations) > 50:
            lines.append(f"  ... {len(self.violations) - 50} more")
        return "\n".join(lines)

    # --- curve and structure ---------------------------------------------

    def _check_euler(self, curve: Curve, label: str):
        g = genus_of(curve)
        if sum(omega_degree(curve, [v]) for v in curve.vertex_ids) != 2 * g - 2:
            self._fail("euler", label, "component omega degrees do not sum to 2g-2")
        for sub in proper_subcurves(curve):
            rest = curve.complement(sub)
            if genus_of(curve, sub) + genus_of(curve, rest) + delta(curve, sub) - 1 != g:
                self._fail("euler", label, f"genus identity fails on {sorted_vertices(curve, sub)}")
            if curve.is_connected(sub) and genus_of(curve, sub) > g:
                self._fail("euler", label, f"subcurve genus exceeds g on {sorted_vertices(curve, sub)}")

    def _check_genus_zero(self, curve: Curve, label: str):
        all_lines = separating_lines(curve) == curve.full
        if (genus_of(curve) == 0) != all_lines:
            self._fail("lemma-g0", label, "genus 0 is not equivalent to all components being lines")

    def _check_tails(self, curve: Curve, label: str):
        g = genus_of(curve)
        tails = all_tails(curve)
        for a, b in combinations([t.vertices for t in tails], 2):
            if not (a | b == curve.full or not (a & b) or a <= b or b <= a):
                self._fail("lemma-zz", label, f"tails {sorted(a)} and {sorted(b)} are unrelated")

        for tail in tails:
            if not curve.is_connected(tail.vertices):
                self._fail("tails", label, f"tail {sorted(tail.vertices)} is disconnected")

        table = small_tails(curve)
        for entry in table.entries:
            z, w = entry.tails
            if z | w != curve.full or z & w:
                self._fail("tails", label, f"tails of {entry.bridge} do not partition the curve")
            if genus_of(curve, z) + genus_of(curve, w) != g:
                self._fail("tails", label, f"tail genera of {entry.bridge} do not sum to g")
            small_genus = genus_of(curve, entry.small)
            if 2 * small_genus > g or (2 * small_genus == g) != entry.splitting:
                self._fail("small-tails", label, f"small tail of {entry.bridge} has genus {small_genus}")

        if is_gstable(curve):
            if len(table.splitting_nodes) > 1:
                self._fail("lemma-zzg", label, "more than one splitting node")
            for a, b in combinations([t.vertices for t in tails], 2):
                for inner, outer in ((a, b), (b, a)):
                    if inner < outer and genus_of(curve, inner) >= genus_of(curve, outer):
                        self._fail("lemma-zzg", label, f"nested tails {sorted(inner)} < {sorted(outer)} "
                                                      f"without a genus increase")

    # --- sheaves ------------------------------------------------------------

    def _check_sheaf_identities(self, curve: Curve, label: str):
        bridges = separating_nodes(curve)
        for e in curve.edges:
            m_q = ideal_sheaf(curve, Node(e.id))
            if is_simple(m_q) != (e.id not in bridges):
                self._fail("simple", label, f"simplicity of the ideal of node {e.id} is wrong")

        degree = int(self.rng.integers(-2, 3))
        sample = random_sheaf(self.rng, curve, degree)
        if dual(dual(sample)) != sample:
            self._fail("dual", label, "dual is not an involution")
        if total_degree(dual(sample)) != -total_degree(sample):
            self._fail("dual", label, "dual does not negate the degree")
        for sub in proper_subcurves(curve):
            rest = curve.complement(sub)
            crossing = sum(1 for e in curve.crossing_edges(sub) if e.id in sample.nonfree)
            if degree_on(sample, sub) + degree_on(sample, rest) + crossing != total_degree(sample):
                self._fail("degree", label, f"degrees are not additive on {sorted_vertices(curve, sub)}")

    def _tail_chains(self, curve: Curve):
        tails = sorted({t.vertices for t in all_tails(curve)}, key=len)

        def extend(chain):
            yield chain
            for z in tails:
                if z > chain[-1]:
                    yield from extend(chain + [z])

        for z in tails:
            yield from extend([z])

    def _check_twister_bound(self, curve: Curve, label: str):
        connected = list(proper_subcurves(curve, connected_only=True))
        for chain in self._tail_chains(curve):
            k = line_bundle(curve)
            for z in chain:
                k = tensor(k, inverse(twister(curve, z)))
            for sub in connected:
                if degree_on(k, sub) < -1:
                    self._fail("twister-bound", label,
                               f"degree {degree_on(k, sub)} on {sorted_vertices(curve, sub)}")
                    return

    # --- stability -----------------------------------------------------------

    def _check_stability(self, curve: Curve, label: str):
        g = genus_of(curve)
        degree = 0 if g == 1 else int(self.rng.integers(-2, 4))
        sheaf = random_sheaf(self.rng, curve, degree)
        ctx = StabilityContext(curve, degree)

        full = classify(sheaf, ctx, cache=self.cache)
        fast = classify(sheaf, ctx, connected_only=True, cache=self.cache)
        if full.classification != fast.classification:
            self._fail("connected-scan", label, "connected-only scan disagrees with the full scan")

        if g >= 2:
            for sub in proper_subcurves(curve):
                if _sign(chi_pairing(sheaf, sub, ctx)) != _sign(margin(sheaf, sub, ctx)):
                    self._fail("chi-sign", label, f"sign mismatch on {sorted_vertices(curve, sub)}")

        bundle = random_sheaf(self.rng, curve, 0, nonfree_probability=0.0)
        ctx0 = StabilityContext(curve, 0)
        for sub in proper_subcurves(curve):
            rest = curve.complement(sub)
            if margin(bundle, sub, ctx0) + margin(bundle, rest, ctx0) != delta(curve, sub):
                self._fail("margin-symmetry", label, f"degree-0 symmetry fails on {sorted_vertices(curve, sub)}")

        if is_gstable(curve) and g % 2 == 1:
            odd = random_sheaf(self.rng, curve, 1)
            report = classify(odd, StabilityContext(curve, 1), cache=self.cache)
            if report.classification == Classification.STRICTLY_SEMISTABLE:
                self._fail("odd-genus", label, "strictly semistable sheaf in degree 1 with g odd")

    # --- Abel maps ----------------------------------------------------------

    def _check_abel0(self, curve: Curve, label: str):
        for base_v in curve.vertex_ids:
            base = generic_label(base_v)
            ctx = StabilityContext(curve, 0, base_v)
            for q in point_classes(curve):
                sheaf = abel0(curve, base, q)
                report = classify(sheaf, ctx, cache=self.cache)
                if not report.p_quasistable:
                    self._fail("abel0", label, f"I_{q} with base {base_v} is not P-quasistable")

    def _check_fibers(self, curve: Curve, label: str):
        base = generic_label(curve.vertex_ids[0])
        partition = fiber_partition(curve)
        classes = point_classes(curve)
        sheaves = {q: abel0(curve, base, q) for q in classes}
        bundle = line_bundle(curve, {base: 1})
        for a, b in combinations(classes, 2):
            verdict = iso_witness(sheaves[a], sheaves[b])
            if verdict != iso_witness(sheaves[b], sheaves[a]):
                self._fail("iso-symmetry", label, f"iso_witness is not symmetric on {a}, {b}")
            same_block = b in fiber_block_of(partition, a)
            expected = IsoVerdict.ISO if same_block else IsoVerdict.NOT_ISO
            if verdict != expected:
                self._fail("fibers", label, f"{a} vs {b}: {verdict.value}, expected {expected.value}")
            if verdict == IsoVerdict.ISO:
                twisted = iso_witness(tensor(sheaves[a], bundle), tensor(sheaves[b], bundle))
                if twisted != IsoVerdict.ISO:
                    self._fail("iso-tensor", label, f"Iso of {a}, {b} lost after tensoring")

    def _check_image(self, curve: Curve, label: str):
        image = image_curve(curve)
        if gen_genus(image) != genus_of(curve):
            self._fail("image", label, f"image genus {gen_genus(image)} != {genus_of(curve)}")

    def _check_restrictions(self, curve: Curve, label: str):
        base = generic_label(curve.vertex_ids[0])
        for spine in spines(curve):
            report = verify_restriction(curve, base, spine)
            if not report.ok:
                self._fail("restriction", label, f"spine {sorted_vertices(curve, spine)} fails")

    def _check_jh(self, curve: Curve, label: str):
        base_v = curve.vertex_ids[0]
        ctx = StabilityContext(curve, 0, base_v)
        for q in point_classes(curve):
            sheaf = abel0(curve, generic_label(base_v), q)
            chains = all_jh_filtrations(sheaf, ctx, cache=self.cache)
            reference = s_invariants(sheaf, ctx, chain=chains[0])
            for chain in chains[1:]:
                other = s_invariants(sheaf, ctx, chain=chain)
                if compare_sclasses(reference, other) is not True:
                    self._fail("jordan-holder", label, f"chains of I_{q} give different graded sheaves")

    def _check_abel1(self, curve: Curve, label: str):
        table = small_tails(curve)
        p_star = basepoint_off_small_tails(curve, table)
        base = generic_label(p_star)
        ctx = StabilityContext(curve, 1, p_star)
        flipped = table.flipped() if table.splitting_nodes else None
        translation = line_bundle(curve, {base: 1})

        for q in point_classes(curve):
            sheaf = abel1(curve, table, q)
            report = classify(sheaf, ctx, cache=self.cache)
            if not report.is_semistable:
                self._fail("abel1", label, f"I^1_{q} is unstable")
            elif not report.p_quasistable:
                self._fail("abel1", label, f"I^1_{q} is not P-quasistable for P on {p_star}")
            detail = degree_one_violation(curve, table, q, sheaf, ctx, report, self.cache)
            if detail is not None:
                self._fail("splitting", label, detail)

            composed = tensor(dual(abel0(curve, base, q)), translation)
            if composed != sheaf:
                self._fail("composition", label, f"I^1_{q} differs from the dual of I_{q} translated")

            if flipped is not None:
                other = abel1(curve, flipped, q)
                if s_equivalent(sheaf, other, StabilityContext(curve, 1), cache=self.cache) is not True:
                    self._fail("choice", label, f"I^1_{q} depends on the splitting-node choice")

    def _check_collapse(self, curve: Curve, label: str):
        report = collapse_analysis(curve, 1, cache=self.cache)
        for detail in report.violations:
            self._fail("collapse", label, detail)
