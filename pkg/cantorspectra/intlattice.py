"""
Exact linear algebra over Z and Q.

Hermite and Smith normal forms with deterministic pivoting, membership in
finitely generated subgroups of Q^d, and invariant factors of quotients of
such subgroups.
"""

import logging
from collections import namedtuple
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import List, Optional, Sequence, Tuple

from sympy import Matrix

from .exactnum import as_fraction
from .exceptions import LatticeError

logger = logging.getLogger(__name__)

IntMatrix = Tuple[Tuple[int, ...], ...]
IntVector = Tuple[int, ...]


# Small integer matrix helpers

def as_int_matrix(rows: Sequence[Sequence[int]]) -> IntMatrix:
    """Validate a rectangular integer matrix and freeze it."""
    frozen = tuple(tuple(int(x) for x in row) for row in rows)
    if frozen and any(len(row) != len(frozen[0]) for row in frozen):
        raise LatticeError("Ragged matrix: rows have different lengths")
    return frozen


def identity(n: int) -> IntMatrix:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def transpose(A: IntMatrix) -> IntMatrix:
    return tuple(zip(*A)) if A else ()


def mat_mul(A: IntMatrix, B: IntMatrix) -> IntMatrix:
    if A and B and len(A[0]) != len(B):
        raise LatticeError(f"Cannot multiply {len(A)}x{len(A[0])} by {len(B)}x{len(B[0])}")
    cols = transpose(B)
    return tuple(tuple(sum(a * b for a, b in zip(row, col)) for col in cols) for row in A)


def mat_vec(A: IntMatrix, v: Sequence) -> tuple:
    """A v for a column vector v (entries may be any ring elements)."""
    if A and len(A[0]) != len(v):
        raise LatticeError(f"Dimension mismatch: {len(A[0])} columns, vector of length {len(v)}")
    out = []
    for row in A:
        acc = 0
        for a, x in zip(row, v):
            if a:
                acc = x * a + acc
        out.append(acc)
    return tuple(out)


def vec_mat(v: Sequence, A: IntMatrix) -> tuple:
    """v^T A for a row vector v."""
    return mat_vec(transpose(A), v)


def is_positive(A: IntMatrix) -> bool:
    return all(x > 0 for row in A for x in row)


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


# Hermite normal form

def hnf_with_transform(A: Sequence[Sequence[int]]) -> Tuple[List[List[int]], List[List[int]]]:
    """
    Row-style Hermite normal form.

    Returns (H, U) with U unimodular and U*A = [H; 0]. H is upper echelon
    with positive pivots and entries above each pivot reduced into
    [0, pivot). Pivots are the smallest magnitude nonzero entry, ties by
    row position.
    """
    rows = [list(r) for r in A]
    m = len(rows)
    n = len(rows[0]) if rows else 0
    U = [[1 if i == j else 0 for j in range(m)] for i in range(m)]

    def sub(target, source, q):
        rows[target] = [x - q * y for x, y in zip(rows[target], rows[source])]
        U[target] = [x - q * y for x, y in zip(U[target], U[source])]

    r = 0
    for c in range(n):
        if r == m:
            break
        found = False
        while True:
            nonzero = [i for i in range(r, m) if rows[i][c] != 0]
            if not nonzero:
                break
            found = True
            p = min(nonzero, key=lambda i: (abs(rows[i][c]), i))
            rows[r], rows[p] = rows[p], rows[r]
            U[r], U[p] = U[p], U[r]
            clean = True
            for i in range(r + 1, m):
                if rows[i][c]:
                    sub(i, r, rows[i][c] // rows[r][c])
                    if rows[i][c]:
                        clean = False
            if clean:
                break
        if not found:
            continue
        if rows[r][c] < 0:
            rows[r] = [-x for x in rows[r]]
            U[r] = [-x for x in U[r]]
        for i in range(r):
            q = rows[i][c] // rows[r][c]
            if q:
                sub(i, r, q)
        r += 1
    return rows[:r], U


def hnf(A: Sequence[Sequence[int]]) -> List[List[int]]:
    """Canonical HNF basis of the integer row space of A."""
    H, _ = hnf_with_transform(A)
    return H


# Smith normal form

@dataclass(frozen=True)
class SNFResult:
    """left * A * right is diagonal with invariant_factors on the diagonal."""
    invariant_factors: Tuple[int, ...]
    left: IntMatrix
    right: IntMatrix
    diagonal: IntMatrix


def snf(A: Sequence[Sequence[int]]) -> SNFResult:
    D = [list(r) for r in as_int_matrix(A)]
    m = len(D)
    n = len(D[0]) if D else 0
    L = [[1 if i == j else 0 for j in range(m)] for i in range(m)]
    R = [[1 if i == j else 0 for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        L[i], L[j] = L[j], L[i]

    def swap_cols(i, j):
        for row in D:
            row[i], row[j] = row[j], row[i]
        for row in R:
            row[i], row[j] = row[j], row[i]

    def add_row(target, source, q):
        D[target] = [x + q * y for x, y in zip(D[target], D[source])]
        L[target] = [x + q * y for x, y in zip(L[target], L[source])]

    def add_col(target, source, q):
        for row in D:
            row[target] += q * row[source]
        for row in R:
            row[target] += q * row[source]

    t = 0
    while t < min(m, n):
        entries = [(abs(D[i][j]), i, j) for i in range(t, m) for j in range(t, n) if D[i][j]]
        if not entries:
            break
        _, i0, j0 = min(entries)
        swap_rows(t, i0)
        swap_cols(t, j0)
        while True:
            cross = [(abs(D[i][t]), i, t) for i in range(t, m) if D[i][t]]
            cross += [(abs(D[t][j]), t, j) for j in range(t + 1, n) if D[t][j]]
            _, pi, pj = min(cross)
            if pi != t:
                swap_rows(t, pi)
            if pj != t:
                swap_cols(t, pj)
            pivot = D[t][t]
            for i in range(t + 1, m):
                if D[i][t]:
                    add_row(i, t, -(D[i][t] // pivot))
            for j in range(t + 1, n):
                if D[t][j]:
                    add_col(j, t, -(D[t][j] // pivot))
            if any(D[i][t] for i in range(t + 1, m)) or any(D[t][j] for j in range(t + 1, n)):
                continue
            bad = next((i for i in range(t + 1, m)
                        if any(D[i][j] % pivot for j in range(t + 1, n))), None)
            if bad is None:
                break
            add_row(t, bad, 1)
        if D[t][t] < 0:
            D[t] = [-x for x in D[t]]
            L[t] = [-x for x in L[t]]
        t += 1

    left, right = as_int_matrix(L), as_int_matrix(R)
    if m and abs(Matrix(L).det()) != 1:
        raise LatticeError("Smith transform on the left is not unimodular")
    if n and abs(Matrix(R).det()) != 1:
        raise LatticeError("Smith transform on the right is not unimodular")
    factors = tuple(D[i][i] for i in range(t))
    return SNFResult(factors, left, right, as_int_matrix(D))


# Finitely generated subgroups of Q^d

class QLattice:
    """
    Finitely generated subgroup of Q^d.

    Generators are cleared by a common denominator and reduced to an
    integer HNF basis; the rational basis (basis / denominator) is the
    canonical form of the subgroup.
    """

    def __init__(self, generators: Sequence[Sequence], ambient_dim: Optional[int] = None):
        gens = [tuple(as_fraction(x) for x in g) for g in generators]
        if ambient_dim is None:
            if not gens:
                raise LatticeError("Ambient dimension needed for an empty generator list")
            ambient_dim = len(gens[0])
        for g in gens:
            if len(g) != ambient_dim:
                raise LatticeError(f"Generator {g} does not live in Q^{ambient_dim}")
        denom = 1
        for g in gens:
            for x in g:
                denom = _lcm(denom, x.denominator)
        scaled = [[(x * denom).numerator for x in g] for g in gens]
        basis, transform = hnf_with_transform(scaled) if scaled else ([], [])

        self.ambient_dim = ambient_dim
        self.generators: Tuple[Tuple[Fraction, ...], ...] = tuple(gens)
        self.denominator = denom
        self.basis: Tuple[Tuple[int, ...], ...] = tuple(tuple(r) for r in basis)
        self._transform = transform

    def __repr__(self):
        return f"QLattice(dim={self.ambient_dim}, rank={self.rank}, basis={self.hnf_basis_text()})"

    @property
    def rank(self) -> int:
        return len(self.basis)

    @property
    def hnf_basis(self) -> Tuple[Tuple[Fraction, ...], ...]:
        return tuple(tuple(Fraction(x, self.denominator) for x in row) for row in self.basis)

    def hnf_basis_text(self) -> List[List[str]]:
        return [[str(x) for x in row] for row in self.hnf_basis]

    def _check_dim(self, x: Sequence) -> Tuple[Fraction, ...]:
        if len(x) != self.ambient_dim:
            raise LatticeError(f"Vector of length {len(x)} tested against a lattice in Q^{self.ambient_dim}")
        return tuple(as_fraction(v) for v in x)

    def coordinates(self, x: Sequence) -> Optional[Tuple[int, ...]]:
        """Integer coefficients of x over the HNF basis, or None if x is not in the lattice."""
        values = self._check_dim(x)
        target = []
        for v in values:
            scaled = v * self.denominator
            if scaled.denominator != 1:
                return None
            target.append(scaled.numerator)
        coeffs = []
        for row in self.basis:
            pc = next(j for j, e in enumerate(row) if e)
            c, rem = divmod(target[pc], row[pc])
            if rem:
                return None
            coeffs.append(c)
            if c:
                target = [t - c * e for t, e in zip(target, row)]
        if any(target):
            return None
        return tuple(coeffs)

    def member(self, x: Sequence) -> bool:
        return self.coordinates(x) is not None

    def generator_coefficients(self, x: Sequence) -> Optional[Tuple[int, ...]]:
        """Integer coefficients of x over the original generators."""
        coeffs = self.coordinates(x)
        if coeffs is None:
            return None
        k = len(self.generators)
        return tuple(sum(c * self._transform[i][j] for i, c in enumerate(coeffs)) for j in range(k))

    def contains(self, other: "QLattice") -> bool:
        if other.ambient_dim != self.ambient_dim:
            raise LatticeError("Lattices live in different dimensions")
        return all(self.member(g) for g in other.generators)

    def equals(self, other: "QLattice") -> bool:
        return self.ambient_dim == other.ambient_dim and self.hnf_basis == other.hnf_basis

    def __eq__(self, other):
        if not isinstance(other, QLattice):
            return NotImplemented
        return self.equals(other)

    def __hash__(self):
        return hash((self.ambient_dim, self.hnf_basis))


def lattice_member(x: Sequence, L: QLattice) -> Optional[Tuple[int, ...]]:
    """Coefficients of x over L's generators, or None when x is not in L."""
    return L.generator_coefficients(x)


class QuotientInvariants(namedtuple("QuotientInvariants", ["invariant_factors", "free_rank"])):
    """Invariant factors of I/E; factors above 1 are the torsion orders."""

    __slots__ = ()

    @property
    def torsion(self) -> Tuple[int, ...]:
        return tuple(d for d in self.invariant_factors if d > 1)

    @property
    def torsion_order(self) -> int:
        order = 1
        for d in self.torsion:
            order *= d
        return order

    @property
    def is_torsion_free(self) -> bool:
        return not self.torsion

    def describe(self) -> str:
        parts = [f"Z/{d}Z" for d in self.torsion] + ["Z"] * self.free_rank
        return " + ".join(parts) if parts else "0"


def quotient_invariants(E: QLattice, I: QLattice) -> QuotientInvariants:
    """Invariant factors and free rank of I/E; requires E contained in I."""
    if E.ambient_dim != I.ambient_dim:
        raise LatticeError(f"Dimension mismatch: Q^{E.ambient_dim} vs Q^{I.ambient_dim}")
    relations = []
    for g in E.generators:
        coeffs = I.coordinates(g)
        if coeffs is None:
            raise LatticeError(f"Generator {[str(x) for x in g]} of E is not in I")
        relations.append(list(coeffs))
    if not relations or I.rank == 0:
        return QuotientInvariants((), I.rank)
    result = snf(relations)
    logger.debug(f"quotient relations {relations} -> factors {result.invariant_factors}")
    return QuotientInvariants(result.invariant_factors, I.rank - len(result.invariant_factors))
