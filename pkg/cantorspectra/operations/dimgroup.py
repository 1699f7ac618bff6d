"""
Dimension-group invariants of a tower.

Rational subgroup membership, image subgroups of R spanned by measure
values, infinitesimals of stationary towers and quotients of subgroups.
"""

import os
import sys
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import List, Optional, Sequence, Tuple

from sympy import Matrix, Rational

from ..exceptions import CantorSpectraException, FieldError, PreconditionError
from ..exactnum import (
    DEFAULT_MAX_DEGREE, FieldElement, NumberField, as_fraction, elem_convert
)
from ..intlattice import (
    IntMatrix, QLattice, QuotientInvariants, mat_mul, mat_vec, quotient_invariants
)
from .measure import StationaryMeasure, ergodicity_certificate, stationary_measure
from .tower import Tower

VERBOSE = os.environ.get('CANTOR_SPECTRA_VERBOSE', '0') == '1'
logger = logging.getLogger(__name__)

MEMBER_AT_LEVEL = "MemberAtLevel"
CERTIFIED_NON_MEMBER = "CertifiedNonMember"
UNKNOWN_UP_TO = "UnknownUpTo"

TRIVIAL = "Trivial"
NON_TRIVIAL = "NonTrivial"

# states visited by the modular cycle search before giving up
MAX_CYCLE_STATES = 1_000_000


def debug_print(message):
    """Print debug messages if VERBOSE is enabled"""
    if VERBOSE:
        print(f"DEBUG: {message}", file=sys.stderr)
        logger.debug(message)


@dataclass(frozen=True)
class RationalMembership:
    verdict: str
    value: Fraction
    level: Optional[int] = None
    depth: Optional[int] = None
    cycle_length: Optional[int] = None

    @property
    def is_member(self) -> bool:
        return self.verdict == MEMBER_AT_LEVEL

    def describe(self) -> str:
        if self.verdict == MEMBER_AT_LEVEL:
            return f"MemberAtLevel({self.level})"
        if self.verdict == UNKNOWN_UP_TO:
            return f"UnknownUpTo({self.depth})"
        return CERTIFIED_NON_MEMBER


def rational_member(t: Tower, p: int, q: int, depth: Optional[int] = None) -> RationalMembership:
    """
    p/q is in the rational subgroup iff (p/q) H_k is integral for some k.
    Non-membership is certified when the tower is periodic and the orbit of
    H_k mod q enters a cycle that avoids the zero vector.
    """
    if q == 0:
        raise PreconditionError("Denominator q must be nonzero")
    value = Fraction(p, q)
    q = value.denominator
    depth = t.levels if depth is None else depth
    for k in range(1, min(depth, t.levels) + 1):
        if all(h % q == 0 for h in t.heights(k)):
            return RationalMembership(MEMBER_AT_LEVEL, value, level=k, depth=depth)

    period = t.period()
    if period is None:
        return RationalMembership(UNKNOWN_UP_TO, value, depth=depth)
    start, p_len = period
    level = start - 1
    state = tuple(h % q for h in t.heights(level))
    seen = {}
    while len(seen) < MAX_CYCLE_STATES:
        if not any(state):
            return RationalMembership(MEMBER_AT_LEVEL, value, level=level, depth=depth)
        phase = (level + 1 - start) % p_len
        key = (state, phase)
        if key in seen:
            debug_print(f"H mod {q} cycles with length {level - seen[key]} from level {seen[key]}")
            return RationalMembership(CERTIFIED_NON_MEMBER, value, depth=depth,
                                      cycle_length=level - seen[key])
        seen[key] = level
        level += 1
        M = t.matrix(start + phase)
        state = tuple(x % q for x in mat_vec(M, state))
    return RationalMembership(UNKNOWN_UP_TO, value, depth=depth)


class SubgroupOfR:
    """Finitely generated subgroup of R inside a number field, as a lattice of coordinates."""

    def __init__(self, field_: NumberField, generators: Sequence[FieldElement]):
        self.field = field_
        self.generators_display: Tuple[FieldElement, ...] = tuple(
            elem_convert(g, field_) for g in generators)
        self.lattice = QLattice([g.coords for g in self.generators_display],
                                ambient_dim=field_.degree)

    def __repr__(self):
        return f"SubgroupOfR(rank={self.lattice.rank}, basis={self.lattice.hnf_basis_text()})"

    def coordinates(self, x: FieldElement) -> Optional[Tuple[int, ...]]:
        return self.lattice.coordinates(elem_convert(x, self.field).coords)

    def contains(self, x: FieldElement) -> bool:
        try:
            return self.coordinates(x) is not None
        except FieldError:
            return False

    def contains_group(self, other: "SubgroupOfR") -> bool:
        return all(self.contains(g) for g in other.generators_display)

    def equals(self, other: "SubgroupOfR") -> bool:
        return self.contains_group(other) and other.contains_group(self)

    def basis_elements(self) -> List[FieldElement]:
        return [FieldElement(row, self.field) for row in self.lattice.hnf_basis]


def subgroup_from_generators(field_: NumberField, elements: Sequence[FieldElement],
                             require_one: bool = True) -> SubgroupOfR:
    group = SubgroupOfR(field_, elements)
    if require_one and not group.contains(field_.one()):
        raise PreconditionError("Subgroup must contain 1 (the trace of the order unit)")
    return group


def image_group(t: Tower, n: int, measure: Optional[StationaryMeasure] = None,
                max_degree: int = DEFAULT_MAX_DEGREE) -> SubgroupOfR:
    """Subgroup generated by 1 and the measures mu_n(k); needs certified unique ergodicity."""
    certificate = ergodicity_certificate(t)
    if not certificate.certified:
        raise PreconditionError("Image group needs a unique-ergodicity certificate")
    try:
        measure = measure or stationary_measure(t, max_degree)
    except CantorSpectraException as e:
        raise PreconditionError(f"Image group needs an exact measure: {e}")
    values = measure.vector(n)
    return SubgroupOfR(measure.field, [measure.field.one()] + list(values))


@dataclass(frozen=True)
class InfinitesimalReport:
    verdict: str
    kernel_basis: Tuple[Tuple[Fraction, ...], ...]
    witness: Optional[Tuple[int, ...]] = None
    level: int = 1
    checked_levels: int = 0
    notes: List[str] = field(default_factory=list)


def _sympy(x: Fraction) -> Rational:
    return Rational(x.numerator, x.denominator)


def _primitive_integer(v: Sequence[Fraction]) -> Optional[Tuple[int, ...]]:
    denom = 1
    for x in v:
        denom = denom * x.denominator // gcd(denom, x.denominator)
    ints = [(x * denom).numerator for x in v]
    g = 0
    for x in ints:
        g = gcd(g, x)
    if g == 0:
        return None
    ints = [x // g for x in ints]
    first = next(x for x in ints if x)
    if first < 0:
        ints = [-x for x in ints]
    return tuple(ints)


def _matrix_power(B: IntMatrix, e: int) -> IntMatrix:
    result = B
    for _ in range(e - 1):
        result = mat_mul(result, B)
    return result


def infinitesimal_report(t: Tower, measure: Optional[StationaryMeasure] = None,
                         max_degree: int = DEFAULT_MAX_DEGREE) -> InfinitesimalReport:
    """
    ker_Q(mu) at level 1 compared with the eventual kernel ker(B^C).
    NonTrivial carries the shortest integer witness found among kernel basis
    vectors and their pairwise sums and differences.
    """
    try:
        measure = measure or stationary_measure(t, max_degree)
    except CantorSpectraException as e:
        raise PreconditionError(f"Infinitesimal report needs a stationary primitive tower: {e}")
    B = t.stationary_matrix
    mu = measure.vector(1)
    size = len(mu)
    d = measure.field.degree
    # d rational constraints, one per power-basis coordinate
    constraints = [[mu[k].coords[i] for k in range(size)] for i in range(d)]
    to_sym = [[_sympy(x) for x in row] for row in constraints]
    kernel = [tuple(as_fraction(x) for x in vec) for vec in Matrix(to_sym).nullspace()]

    for v in kernel:
        image = mat_vec(B, v)
        if any(sum(row[k] * image[k] for k in range(size)) != 0 for row in constraints):
            raise PreconditionError("ker(mu) is not invariant under the stationary matrix")

    BC = _matrix_power(B, size)
    eventual = [tuple(as_fraction(x) for x in vec) for vec in Matrix(BC).nullspace()]
    outside = [v for v in kernel if any(mat_vec(BC, v))]
    if not outside:
        return InfinitesimalReport(TRIVIAL, tuple(kernel), level=1,
                                   notes=[f"eventual kernel dimension {len(eventual)}"])

    pool = list(kernel)
    for i in range(len(kernel)):
        for j in range(i + 1, len(kernel)):
            pool.append(tuple(a + b for a, b in zip(kernel[i], kernel[j])))
            pool.append(tuple(a - b for a, b in zip(kernel[i], kernel[j])))
    candidates = []
    for v in pool:
        w = _primitive_integer(v)
        if w is not None and any(mat_vec(BC, w)):
            candidates.append(w)
    witness = min(candidates, key=lambda w: (max(abs(x) for x in w), w))

    for j in range(2, t.levels + 1):
        if not any(mat_vec(t.products(j, 1), witness)):
            raise PreconditionError(f"Witness {witness} vanishes at level {j}")
    debug_print(f"infinitesimal witness {witness}")
    return InfinitesimalReport(NON_TRIVIAL, tuple(kernel), witness=witness, level=1,
                               checked_levels=t.levels)


def torsion_quotient(I: SubgroupOfR, E: SubgroupOfR) -> QuotientInvariants:
    """Invariant factors of I/E on the coordinate lattices."""
    if E.field != I.field:
        E = SubgroupOfR(I.field, E.generators_display)
    return quotient_invariants(E.lattice, I.lattice)


@dataclass(frozen=True)
class AdmissibilityReport:
    contains_integers: bool
    contained_in_image: bool
    torsion_free: Optional[bool]
    rationally_independent: bool
    rank: int
    quotient: Optional[QuotientInvariants] = None

    @property
    def admissible(self) -> bool:
        return (self.contains_integers and self.contained_in_image
                and bool(self.torsion_free) and self.rationally_independent)


def eigenvalue_group_admissibility(I: SubgroupOfR, gamma: SubgroupOfR) -> AdmissibilityReport:
    """
    Group-level test of whether gamma can be the eigenvalue group of a
    system with image group I and trivial infinitesimals: Z in gamma,
    gamma inside I, I/gamma torsion-free, generators rationally independent.
    """
    if gamma.field != I.field:
        gamma = SubgroupOfR(I.field, gamma.generators_display)
    contains_integers = gamma.contains(gamma.field.one())
    contained = I.contains_group(gamma)
    quotient = torsion_quotient(I, gamma) if contained else None
    nonzero = [g for g in gamma.generators_display if not g.is_zero()]
    return AdmissibilityReport(
        contains_integers=contains_integers,
        contained_in_image=contained,
        torsion_free=quotient.is_torsion_free if quotient is not None else None,
        rationally_independent=gamma.lattice.rank == len(nonzero),
        rank=gamma.lattice.rank,
        quotient=quotient,
    )
