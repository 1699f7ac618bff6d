"""
Invariant measures of tower bases.

Exact measure vectors for stationary primitive towers (left Perron
eigenvector in the Perron root's field), certified interval enclosures for
arbitrary towers, and unique-ergodicity certificates.
"""

import os
import sys
import math
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple, Union

from sympy import Matrix, Poly, Rational, Symbol, factor_list

from ..exceptions import MeasureError
from ..exactnum import (
    DEFAULT_MAX_DEGREE, RATIONALS, FieldElement, IntervalReal, NumberField,
    as_fraction, field_nullspace
)
from ..intlattice import IntMatrix, is_positive, mat_mul, vec_mat
from .tower import Tower

VERBOSE = os.environ.get('CANTOR_SPECTRA_VERBOSE', '0') == '1'
logger = logging.getLogger(__name__)

UNIQUELY_ERGODIC = "UniquelyErgodicCertified"
UNKNOWN = "Unknown"

_X = Symbol('x')


def debug_print(message):
    """Print debug messages if VERBOSE is enabled"""
    if VERBOSE:
        print(f"DEBUG: {message}", file=sys.stderr)
        logger.debug(message)


@dataclass(frozen=True)
class MeasureVector:
    """Measures of the level-n tower bases, exact or enclosed."""
    level: int
    values: Tuple[Union[FieldElement, IntervalReal], ...]
    exact: bool = True
    converged: bool = True
    depth: Optional[int] = None

    @property
    def width(self) -> Fraction:
        if self.exact:
            return Fraction(0)
        return max(v.width for v in self.values)


@dataclass(frozen=True)
class ErgodicityCertificate:
    verdict: str
    reason: str
    rho: Optional[Fraction] = None
    details: Dict[str, object] = field(default_factory=dict)

    @property
    def certified(self) -> bool:
        return self.verdict == UNIQUELY_ERGODIC


def is_primitive(B: IntMatrix) -> bool:
    """Some power of B is strictly positive (checked up to (C-1)^2 + 1)."""
    size = len(B)
    if any(len(row) != size for row in B):
        raise MeasureError("Primitivity needs a square matrix")
    power = B
    for _ in range((size - 1) ** 2 + 1):
        if is_positive(power):
            return True
        power = mat_mul(power, B)
        # keep entries small: only the zero pattern matters
        power = tuple(tuple(1 if x else 0 for x in row) for row in power)
    return False


def _perron_factor(B: IntMatrix) -> Tuple[Poly, Fraction, Fraction]:
    """Irreducible factor of the characteristic polynomial holding the spectral radius, with an isolating interval."""
    charpoly = Matrix(B).charpoly(_X)
    _, factors = factor_list(charpoly.as_expr(), _X)
    polys = [Poly(f, _X) for f, _ in factors]
    eps = Fraction(1, 256)
    while True:
        tops = []
        for p in polys:
            intervals = p.intervals(eps=Rational(eps.numerator, eps.denominator))
            if intervals:
                (a, b), _ = intervals[-1]
                tops.append((as_fraction(b), as_fraction(a), p))
        tops.sort(key=lambda item: item[0])
        best_hi, best_lo, best = tops[-1]
        if all(hi < best_lo for hi, _, _ in tops[:-1]):
            return best, best_lo, best_hi
        eps /= 256


def perron_eigen(B: IntMatrix, max_degree: int = DEFAULT_MAX_DEGREE) -> Tuple[FieldElement, List[FieldElement]]:
    """
    Perron root of a primitive matrix B and a left Perron eigenvector
    y (y^T B = lambda y^T), both exact in Q(lambda).
    """
    if not is_primitive(B):
        raise MeasureError(f"Matrix {[list(r) for r in B]} is not primitive")
    poly, lo, hi = _perron_factor(B)
    degree = poly.degree()
    if degree > max_degree:
        raise MeasureError(f"Perron root has degree {degree}, above the bound {max_degree}")
    coeffs = [int(c) for c in poly.all_coeffs()]
    if degree == 1:
        field_ = RATIONALS
        perron = field_.from_rational(Fraction(-coeffs[1], coeffs[0]))
    else:
        field_ = NumberField(coeffs, (lo, hi), check_irreducible=False, max_degree=max_degree)
        perron = field_.theta()
    size = len(B)
    rows = [[field_.from_rational(B[j][i]) - (perron if i == j else 0) for j in range(size)]
            for i in range(size)]
    kernel = field_nullspace(rows, field_)
    if len(kernel) != 1:
        raise MeasureError(f"Perron eigenspace has dimension {len(kernel)}")
    y = kernel[0]
    debug_print(f"Perron root {perron} with minimal polynomial {coeffs}")
    return perron, y


def _dot(values, ints) -> FieldElement:
    acc = None
    for v, h in zip(values, ints):
        term = v * h
        acc = term if acc is None else acc + term
    return acc


class StationaryMeasure:
    """Exact measure vectors mu_n of a stationary primitive tower."""

    def __init__(self, tower: Tower, perron_root: FieldElement, eigenvector: List[FieldElement]):
        self.tower = tower
        self.perron_root = perron_root
        self.field: NumberField = perron_root.field
        self._eigenvector = eigenvector
        self._vectors: Dict[int, Tuple[FieldElement, ...]] = {}

    @property
    def levels(self) -> int:
        return self.tower.levels

    def vector(self, n: int) -> Tuple[FieldElement, ...]:
        """mu_n = y / (y . H_n), cross-checked with mu_{n-1}^T = mu_n^T M_n."""
        cached = self._vectors.get(n)
        if cached is not None:
            return cached
        H = self.tower.heights(n)
        scale = _dot(self._eigenvector, H).inverse()
        mu = tuple(y * scale for y in self._eigenvector)
        if n > 1 and vec_mat(mu, self.tower.matrix(n)) != self.vector(n - 1):
            raise MeasureError(f"mu_{n - 1}^T != mu_{n}^T M_{n}")
        if _dot(mu, H) != 1:
            raise MeasureError(f"mu_{n}^T H_{n} != 1")
        self._vectors[n] = mu
        return mu

    def measure_vector(self, n: int) -> MeasureVector:
        return MeasureVector(n, self.vector(n), exact=True, converged=True, depth=n)


def stationary_measure(t: Tower, max_degree: int = DEFAULT_MAX_DEGREE) -> StationaryMeasure:
    key = ("stationary_measure", max_degree)
    cached = t.derived.get(key)
    if cached is not None:
        return cached
    B = t.stationary_matrix
    if B is None:
        raise MeasureError("Exact measures need a stationary tower")
    perron, y = perron_eigen(B, max_degree)
    measure = StationaryMeasure(t, perron, y)
    measure.vector(1)
    t.derived[key] = measure
    return measure


def measure_enclosure(t: Tower, n: int, eps: Fraction, N: Optional[int] = None) -> MeasureVector:
    """
    mu_n(k) lies in the hull of P_{N,n}(l,k) / h_N(l) over l for every
    invariant measure. The weights mu_N(l) h_N(l) of that convex combination
    are free at depth N, so the hull is the whole enclosure; it is not
    tightened with birkhoff_bound and only a deeper N narrows it.
    converged is True when the hull is narrower than eps.
    """
    N = t.levels if N is None else N
    if not 1 <= n < N <= t.levels:
        raise MeasureError(f"Enclosure needs 1 <= n < N <= {t.levels}, got n={n}, N={N}")
    P = t.products(N, n)
    H = t.heights(N)
    values = []
    for k in range(t.width(n)):
        ratios = [Fraction(P[l][k], H[l]) for l in range(len(H))]
        values.append(IntervalReal(min(ratios), max(ratios)))
    widest = max(v.width for v in values)
    return MeasureVector(n, tuple(values), exact=False, converged=widest <= eps, depth=N)


def _sqrt_lower(value: Fraction, bits: int = 32) -> Fraction:
    num, den = value.numerator, value.denominator
    return Fraction(math.isqrt(num * den << (2 * bits)), den << bits)


def birkhoff_bound(M: IntMatrix) -> Fraction:
    """Rational upper bound of the Birkhoff contraction coefficient of a positive matrix."""
    rows, cols = len(M), len(M[0])
    if rows == 1 or cols == 1:
        return Fraction(0)
    phi = Fraction(1)
    for i in range(rows):
        for j in range(rows):
            for k in range(cols):
                for l in range(cols):
                    ratio = Fraction(M[i][k] * M[j][l], M[j][k] * M[i][l])
                    if ratio < phi:
                        phi = ratio
    s = _sqrt_lower(phi)
    return (1 - s) / (1 + s)


def ergodicity_certificate(t: Tower, depth: Optional[int] = None) -> ErgodicityCertificate:
    depth = t.levels if depth is None else min(depth, t.levels)
    B = t.stationary_matrix
    if B is not None and is_primitive(B):
        return ErgodicityCertificate(UNIQUELY_ERGODIC, "stationary-primitive",
                                     details={"matrix": [list(r) for r in B]})
    if all(w == 1 for w in t.widths[:depth]):
        return ErgodicityCertificate(UNIQUELY_ERGODIC, "projective-contraction", rho=Fraction(0))
    period = t.period()
    if period is not None:
        start, p = period
        if start + p - 1 <= depth:
            rho = Fraction(1)
            for n in range(start, start + p):
                rho *= birkhoff_bound(t.matrix(n))
            if rho < 1:
                debug_print(f"periodic from level {start} with period {p}, contraction bound {rho}")
                return ErgodicityCertificate(UNIQUELY_ERGODIC, "projective-contraction", rho=rho,
                                             details={"period_start": start, "period": p})
    return ErgodicityCertificate(UNKNOWN, "none")
