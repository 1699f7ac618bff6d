"""
Necessary conditions for continuous eigenvalues.

For a candidate alpha the battery splits alpha H_m into a small part v_m
and an integer part w_m, then checks:

  * orthogonality: alpha = mu_m^T w_m (exact, in the measure field);
  * summability of ||P_{n,m} v_m||;
  * decay of the suffix sums |<s, v_n>| over admissible suffixes;
  * for rational alpha, membership in the rational subgroup.

A failed exact check refutes alpha. Passing every check up to level N is
evidence only and is reported as PassesUpTo(N).
"""

import os
import sys
import math
import logging
import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from ..exceptions import CantorSpectraException, FieldError, PreconditionError, TowerError
from ..exactnum import (
    DEFAULT_MAX_DEGREE, FieldElement, IntervalReal, elem_convert, nearest_integer_split
)
from ..intlattice import mat_vec
from .dimgroup import (
    CERTIFIED_NON_MEMBER, MEMBER_AT_LEVEL, InfinitesimalReport, RationalMembership,
    SubgroupOfR, image_group, infinitesimal_report, rational_member
)
from .measure import StationaryMeasure, ergodicity_certificate, stationary_measure
from .tower import Tower, TowerPath, suffix_of_path, suffix_vectors

VERBOSE = os.environ.get('CANTOR_SPECTRA_VERBOSE', '0') == '1'
logger = logging.getLogger(__name__)

REFUTED = "RefutedNecessary"
PASSES = "PassesUpTo"
CERTIFIED = "CertifiedEigen"

DEFAULT_BITS = 128
DEFAULT_FLOOR = Fraction(1, 64)

AUDIT_HEADER = ("E+ is the set of candidates that passed the battery up to level N; "
                "it stands in for the eigenvalue group, so flags are falsification "
                "evidence, not a decision.")


def debug_print(message):
    """Print debug messages if VERBOSE is enabled"""
    if VERBOSE:
        print(f"DEBUG: {message}", file=sys.stderr)
        logger.debug(message)


@dataclass(frozen=True)
class Verdict:
    kind: str
    reason: Optional[str] = None
    depth: Optional[int] = None

    @property
    def refuted(self) -> bool:
        return self.kind == REFUTED

    @property
    def in_eplus(self) -> bool:
        return self.kind in (PASSES, CERTIFIED)

    def describe(self) -> str:
        if self.kind == PASSES:
            return f"{PASSES}({self.depth})"
        return f"{self.kind}({self.reason})"


@dataclass(frozen=True)
class Decomposition:
    """alpha H_m = v + w with w integral and every v entry in [-1/2, 1/2)."""
    m: int
    v: Tuple[FieldElement, ...]
    w: Tuple[int, ...]


@dataclass
class SummabilityResult:
    m: int
    terms: List[IntervalReal]
    partial_sums: List[IntervalReal]
    rho: Optional[IntervalReal]
    sub_verdict: str


@dataclass
class SuffixResult:
    deltas: Dict[int, IntervalReal]
    sub_verdict: str


@dataclass
class CriteriaReport:
    alpha: FieldElement
    m: int
    N: int
    decomposition: Decomposition
    orthogonality: Dict[int, bool] = field(default_factory=dict)
    stabilized_level: Optional[int] = None
    summability: Optional[SummabilityResult] = None
    suffix: Optional[SuffixResult] = None
    rational: Optional[RationalMembership] = None
    divergence_cycle: Optional[Tuple[int, int]] = None
    verdict: Optional[Verdict] = None
    notes: List[str] = field(default_factory=list)

    @property
    def orthogonality_exact(self) -> Optional[bool]:
        if not self.orthogonality:
            return None
        return any(self.orthogonality.values())


@dataclass(frozen=True)
class Candidate:
    alpha: FieldElement
    w: Tuple[int, ...]
    verdict: Verdict
    report: CriteriaReport


@dataclass
class AuditReport:
    m: int
    wbox: int
    kmax: int
    N: int
    image_group: SubgroupOfR
    infinitesimals: InfinitesimalReport
    eplus: List[FieldElement]
    candidates: int
    flags: List[dict]
    header: str = AUDIT_HEADER


@dataclass
class DiagnosticResult:
    m: int
    terms: List[IntervalReal]
    partial_sums: List[IntervalReal]
    rho: Optional[IntervalReal]


# Helpers

def _dot(values: Sequence[FieldElement], ints: Sequence[int]):
    acc = None
    for v, k in zip(values, ints):
        term = v * k
        acc = term if acc is None else acc + term
    return acc


def _norm(values: Sequence[FieldElement], bits: int) -> IntervalReal:
    return IntervalReal.maximum(abs(v.enclosure(bits)) for v in values)


def _running_sums(terms: Sequence[IntervalReal]) -> List[IntervalReal]:
    sums, acc = [], IntervalReal.point(0)
    for term in terms:
        acc = acc + term
        sums.append(acc)
    return sums


def ratio_estimate(terms: Sequence[IntervalReal]) -> Optional[IntervalReal]:
    """Average of consecutive term ratios over the trailing third of the series."""
    if len(terms) < 2:
        return None
    window = math.ceil(len(terms) / 3)
    ratios = []
    for i in range(max(1, len(terms) - window), len(terms)):
        prev, cur = terms[i - 1], terms[i]
        if prev.lo <= 0:
            continue
        ratios.append(IntervalReal(cur.lo / prev.hi, cur.hi / prev.lo))
    if not ratios:
        return None
    total = IntervalReal.point(0)
    for r in ratios:
        total = total + r
    return total * Fraction(1, len(ratios))


def _trailing_floor(values: Sequence[IntervalReal], floor: Fraction) -> bool:
    if not values:
        return False
    window = math.ceil(len(values) / 3)
    return all(v.lo >= floor for v in values[-window:])


def _check_range(t: Tower, m: int, N: int) -> None:
    if not 1 <= m < N <= t.levels:
        raise TowerError(f"Need 1 <= m < N <= {t.levels}, got m={m}, N={N}")


def _try_measure(t: Tower, max_degree: int) -> Optional[StationaryMeasure]:
    try:
        return stationary_measure(t, max_degree)
    except CantorSpectraException as e:
        debug_print(f"no exact measure: {e}")
        return None


# Battery operations

def decompose(t: Tower, alpha: FieldElement, m: int) -> Decomposition:
    if not 1 <= m <= t.levels:
        raise TowerError(f"Level {m} out of range [1, {t.levels}]")
    parts = [nearest_integer_split(alpha * h) for h in t.heights(m)]
    return Decomposition(m, tuple(f for _, f in parts), tuple(z for z, _ in parts))


def orthogonality_test(t: Tower, alpha: FieldElement, m: int,
                       measure: Optional[StationaryMeasure] = None) -> bool:
    """alpha = mu_m^T w_m as an exact field identity."""
    if measure is None:
        raise PreconditionError("Orthogonality test needs an exact measure")
    try:
        alpha = elem_convert(alpha, measure.field)
    except FieldError:
        # outside Q(lambda), so never mu_m^T w
        return False
    w = decompose(t, alpha, m).w
    return _dot(measure.vector(m), w) == alpha


def summability_test(t: Tower, alpha: FieldElement, m: int, N: int,
                     bits: int = DEFAULT_BITS, floor: Fraction = DEFAULT_FLOOR) -> SummabilityResult:
    """Terms ||P_{n,m} v_m||_inf for n = m+1..N with partial sums and a decay estimate."""
    _check_range(t, m, N)
    u = decompose(t, alpha, m).v
    terms = []
    for n in range(m + 1, N + 1):
        u = mat_vec(t.matrix(n), u)
        terms.append(_norm(u, bits))
    if all(term.hi == 0 for term in terms):
        sub_verdict = "vanishing"
    elif _trailing_floor(terms, floor):
        sub_verdict = "divergence-evidence"
    else:
        sub_verdict = "no-divergence-evidence"
    return SummabilityResult(m, terms, _running_sums(terms), ratio_estimate(terms), sub_verdict)


def suffix_criterion(t: Tower, alpha: FieldElement, N: int, start: int = 1,
                     bits: int = DEFAULT_BITS, floor: Fraction = DEFAULT_FLOOR) -> SuffixResult:
    """
    delta_n = max |<s, v_n>| over admissible suffix vectors s at level n,
    with the signed small parts v_n of alpha H_n.
    """
    last = min(N, t.levels - 1)
    if not 1 <= start <= last:
        raise TowerError(f"Suffix range [{start}, {last}] is empty")
    deltas = {}
    for n in range(start, last + 1):
        v = decompose(t, alpha, n).v
        sums = [_dot(v, s) for s in suffix_vectors(t, n).all_attained()]
        deltas[n] = IntervalReal.maximum(abs(x.enclosure(bits)) for x in sums)
    values = list(deltas.values())
    sub_verdict = "non-convergence-evidence" if _trailing_floor(values, floor) else "no-divergence-evidence"
    return SuffixResult(deltas, sub_verdict)


def return_time(t: Tower, path: TowerPath, n: int) -> int:
    """r_n = sum over k < n of <s_k, H_k>."""
    if not 1 <= n <= path.level:
        raise TowerError(f"Path of level {path.level} cannot give r_{n}")
    return sum(sum(s * h for s, h in zip(suffix_of_path(t, path, k), t.heights(k)))
               for k in range(1, n))


def return_phase(t: Tower, path: TowerPath, alpha: FieldElement, n: int,
                 bits: int = DEFAULT_BITS) -> IntervalReal:
    """Enclosure of alpha r_n mod 1."""
    phase = alpha * return_time(t, path, n)
    return (phase - phase.floor()).enclosure(bits)


def _divergence_cycle(t: Tower, small_parts: Dict[int, Tuple[FieldElement, ...]]) -> Optional[Tuple[int, int]]:
    """
    (level, length) of a repetition of (v_n, phase) on a periodic tower with
    a nonzero v in the cycle. Then v_n does not tend to 0.
    """
    period = t.period()
    if period is None:
        return None
    start, p = period
    seen = {}
    for n in sorted(small_parts):
        if n < start:
            continue
        key = (small_parts[n], (n - start) % p)
        if key in seen:
            first = seen[key]
            if any(not x.is_zero() for k in range(first, n) for x in small_parts[k]):
                return first, n - first
            return None
        seen[key] = n
    return None


def eigen_verdict(t: Tower, alpha: FieldElement, m: int, N: int, depth: Optional[int] = None,
                  measure: Optional[StationaryMeasure] = None,
                  declared: Optional[SubgroupOfR] = None,
                  bits: int = DEFAULT_BITS, floor: Fraction = DEFAULT_FLOOR,
                  max_degree: int = DEFAULT_MAX_DEGREE) -> Tuple[Verdict, CriteriaReport]:
    _check_range(t, m, N)
    depth = t.levels if depth is None else depth
    measure = measure or _try_measure(t, max_degree)
    if measure is not None:
        try:
            alpha = elem_convert(alpha, measure.field)
        except FieldError as e:
            debug_print(f"Candidate kept in its own field: {e}")

    report = CriteriaReport(alpha, m, N, decompose(t, alpha, m))

    if alpha.is_rational():
        value = alpha.rational_value()
        membership = rational_member(t, value.numerator, value.denominator, depth)
        report.rational = membership
        if membership.verdict == MEMBER_AT_LEVEL:
            verdict = Verdict(CERTIFIED, "rational-member")
        elif membership.verdict == CERTIFIED_NON_MEMBER:
            verdict = Verdict(REFUTED, "rational-certified-non-member")
        else:
            verdict = Verdict(PASSES, depth=N)
        report.verdict = verdict
        return verdict, report

    if declared is not None and declared.contains(alpha):
        verdict = Verdict(CERTIFIED, "declared-by-construction")
        report.verdict = verdict
        return verdict, report

    if measure is not None:
        # a refutation must hold at m, at m+1 and at the deepest level
        for level in sorted({m, m + 1, N}):
            report.orthogonality[level] = orthogonality_test(t, alpha, level, measure)
        stabilized = next((l for l in range(m, N + 1)
                           if orthogonality_test(t, alpha, l, measure)), None)
        report.stabilized_level = stabilized
    else:
        stabilized = None
        report.notes.append("orthogonality skipped: no exact measure for this tower")

    base = stabilized if stabilized is not None and stabilized < N else m
    report.summability = summability_test(t, alpha, base, N, bits, floor)
    report.suffix = suffix_criterion(t, alpha, N, base, bits, floor)
    small_parts = {n: decompose(t, alpha, n).v for n in range(base, N + 1)}
    report.divergence_cycle = _divergence_cycle(t, small_parts)

    if report.orthogonality and not any(report.orthogonality.values()):
        verdict = Verdict(REFUTED, "orthogonality")
    elif report.divergence_cycle and report.summability.sub_verdict == "divergence-evidence":
        verdict = Verdict(REFUTED, "summability-divergence")
    elif report.divergence_cycle and report.suffix.sub_verdict == "non-convergence-evidence":
        verdict = Verdict(REFUTED, "suffix-divergence")
    else:
        verdict = Verdict(PASSES, depth=N)
    report.verdict = verdict
    return verdict, report


def _warm(t: Tower, measure: Optional[StationaryMeasure], N: int) -> None:
    """Fill shared caches before handing the tower to worker threads."""
    t.heights(N)
    for n in range(2, N + 1):
        t.products(n, n - 1)
    if measure is not None:
        measure.vector(N)


def enumerate_candidates(t: Tower, m: int, wbox: int, N: Optional[int] = None,
                         depth: Optional[int] = None,
                         measure: Optional[StationaryMeasure] = None,
                         declared: Optional[SubgroupOfR] = None,
                         threads: int = 1, bits: int = DEFAULT_BITS,
                         floor: Fraction = DEFAULT_FLOOR,
                         max_degree: int = DEFAULT_MAX_DEGREE) -> List[Candidate]:
    """
    alpha = mu_m^T w for every integer w with |w|_inf <= wbox, in
    lexicographic order of w, deduplicated by exact equality.
    """
    if wbox < 1:
        raise PreconditionError("wbox must be >= 1")
    N = t.levels if N is None else N
    if measure is None:
        try:
            measure = stationary_measure(t, max_degree)
        except CantorSpectraException as e:
            raise PreconditionError(f"Candidate enumeration needs an exact measure: {e}")
    mu = measure.vector(m)
    H = t.heights(m)

    vectors = set(itertools.product(range(-wbox, wbox + 1), repeat=len(mu)))
    vectors.update((tuple(H), tuple(-h for h in H)))
    found: Dict[FieldElement, Tuple[int, ...]] = {}
    for w in sorted(vectors):
        alpha = _dot(mu, w)
        if alpha not in found:
            found[alpha] = w

    _warm(t, measure, N)
    alphas = list(found)

    def run(alpha):
        return eigen_verdict(t, alpha, m, N, depth, measure, declared, bits, floor, max_degree)

    with ThreadPoolExecutor(max_workers=max(1, threads)) as executor:
        results = list(executor.map(run, alphas))
    debug_print(f"{len(alphas)} candidates at level {m} with box {wbox}")
    return [Candidate(alpha, found[alpha], verdict, report)
            for alpha, (verdict, report) in zip(alphas, results)]


def torsion_audit(t: Tower, m: int, wbox: int, kmax: int, N: int,
                  depth: Optional[int] = None, threads: int = 1,
                  bits: int = DEFAULT_BITS, floor: Fraction = DEFAULT_FLOOR,
                  max_degree: int = DEFAULT_MAX_DEGREE) -> AuditReport:
    """
    Look for alpha in I_m with k alpha in E+ (k = 2..kmax) while alpha itself
    is refuted: a torsion element of I/E. Each flag carries the count of
    levels n in (m, N] where P_{n,m} w_m(k alpha) / k is not integral.
    """
    _check_range(t, m, N)
    if not ergodicity_certificate(t).certified:
        raise PreconditionError("Torsion audit needs a unique-ergodicity certificate")
    try:
        measure = stationary_measure(t, max_degree)
    except CantorSpectraException as e:
        raise PreconditionError(f"Torsion audit needs an exact measure: {e}")
    infinitesimals = infinitesimal_report(t, measure)
    image = image_group(t, m, measure)

    candidates = enumerate_candidates(t, m, wbox, N, depth, measure, None, threads,
                                      bits, floor, max_degree)
    verdicts = {c.alpha: c.verdict for c in candidates}
    eplus = [c.alpha for c in candidates if c.verdict.in_eplus]

    pairs = []
    for beta in eplus:
        if beta.is_zero():
            continue
        for k in range(2, kmax + 1):
            alpha = beta / k
            if image.contains(alpha):
                pairs.append((alpha, k, beta))
    pending = [alpha for alpha, _, _ in pairs if alpha not in verdicts]
    pending = list(dict.fromkeys(pending))

    def run(alpha):
        return eigen_verdict(t, alpha, m, N, depth, measure, None, bits, floor, max_degree)[0]

    with ThreadPoolExecutor(max_workers=max(1, threads)) as executor:
        for alpha, verdict in zip(pending, executor.map(run, pending)):
            verdicts[alpha] = verdict

    flags, seen = [], set()
    for alpha, k, beta in pairs:
        verdict = verdicts[alpha]
        if not verdict.refuted or (alpha, k) in seen:
            continue
        seen.add((alpha, k))
        w = decompose(t, beta, m).w
        non_integer = sum(1 for n in range(m + 1, N + 1)
                          if any(x % k for x in mat_vec(t.products(n, m), w)))
        flags.append({
            "alpha": alpha,
            "k": k,
            "k_alpha": beta,
            "alpha_verdict": verdict.describe(),
            "reason": "torsion-lemma",
            "non_integer_levels": non_integer,
        })
    logger.info(f"torsion audit: {len(eplus)} candidates in E+, {len(flags)} flags")
    return AuditReport(m, wbox, kmax, N, image, infinitesimals, eplus, len(candidates), flags)


def convergence_diagnostic(t: Tower, m: int, N: int,
                           measure: Optional[StationaryMeasure] = None,
                           bits: int = DEFAULT_BITS,
                           max_degree: int = DEFAULT_MAX_DEGREE) -> DiagnosticResult:
    """t_n = max_i max_k |h_n(i) mu_m(k) - P_{n,m}(i,k)| for n = m+1..N."""
    _check_range(t, m, N)
    if measure is None:
        try:
            measure = stationary_measure(t, max_degree)
        except CantorSpectraException as e:
            raise PreconditionError(f"Convergence diagnostic needs an exact measure: {e}")
    mu = measure.vector(m)
    terms = []
    for n in range(m + 1, N + 1):
        P = t.products(n, m)
        H = t.heights(n)
        entries = [mu[k] * H[i] - P[i][k] for i in range(len(H)) for k in range(len(mu))]
        terms.append(_norm(entries, bits))
    return DiagnosticResult(m, terms, _running_sums(terms), ratio_estimate(terms))
