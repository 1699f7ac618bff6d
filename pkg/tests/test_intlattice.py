from fractions import Fraction

import pytest
from hypothesis import assume, given, strategies as st
from sympy import Matrix

from cantorspectra.exceptions import LatticeError
from cantorspectra.intlattice import (
    QLattice,
    as_int_matrix,
    hnf,
    hnf_with_transform,
    lattice_member,
    mat_mul,
    mat_vec,
    quotient_invariants,
    snf,
    vec_mat,
)


def int_matrices(rows, cols, bound=12):
    return st.lists(
        st.lists(st.integers(-bound, bound), min_size=cols, max_size=cols),
        min_size=rows, max_size=rows)


class TestHelpers:
    def test_products(self):
        A = as_int_matrix([[1, 2], [3, 4]])
        assert mat_mul(A, A) == ((7, 10), (15, 22))
        assert mat_vec(A, (1, 1)) == (3, 7)
        assert vec_mat((1, 1), A) == (4, 6)

    def test_ragged(self):
        with pytest.raises(LatticeError):
            as_int_matrix([[1, 2], [3]])

    def test_dimension_mismatch(self):
        with pytest.raises(LatticeError):
            mat_vec(((1, 2),), (1, 2, 3))


class TestHermite:
    def test_known_form(self):
        assert hnf([[2, 0], [-1, 1]]) == [[1, 1], [0, 2]]

    def test_zero_rows_dropped(self):
        assert hnf([[2, 4], [1, 2]]) == [[1, 2]]

    @given(int_matrices(3, 3))
    def test_idempotent(self, A):
        H = hnf(A)
        assert hnf(H) == H

    @given(int_matrices(3, 2))
    def test_transform(self, A):
        H, U = hnf_with_transform(A)
        assert abs(Matrix(U).det()) == 1
        product = [list(r) for r in mat_mul(as_int_matrix(U), as_int_matrix(A))]
        assert product[:len(H)] == H
        assert all(not any(r) for r in product[len(H):])

    @given(int_matrices(3, 3))
    def test_echelon_shape(self, A):
        H = hnf(A)
        pivots = [next(j for j, x in enumerate(row) if x) for row in H]
        assert pivots == sorted(set(pivots))
        for i, (row, pc) in enumerate(zip(H, pivots)):
            assert row[pc] > 0
            for above in H[:i]:
                assert 0 <= above[pc] < row[pc]


class TestSmith:
    def test_known_factors(self):
        assert snf([[2, 0], [0, 3]]).invariant_factors == (1, 6)

    @given(int_matrices(3, 3))
    def test_reconstruction(self, A):
        result = snf(A)
        assert mat_mul(mat_mul(result.left, as_int_matrix(A)), result.right) == result.diagonal
        factors = result.invariant_factors
        assert all(d > 0 for d in factors)
        assert all(b % a == 0 for a, b in zip(factors, factors[1:]))

    @given(int_matrices(2, 3))
    def test_rectangular(self, A):
        result = snf(A)
        D = result.diagonal
        off = [D[i][j] for i in range(2) for j in range(3) if i != j]
        assert not any(off)


class TestQLattice:
    def test_membership_and_coefficients(self):
        L = QLattice([(1, 0), (Fraction(1, 2), Fraction(1, 2))])
        x = (Fraction(3, 2), Fraction(1, 2))
        coeffs = lattice_member(x, L)
        assert coeffs is not None
        combo = tuple(sum(c * g[i] for c, g in zip(coeffs, L.generators)) for i in range(2))
        assert combo == x
        assert lattice_member((Fraction(1, 4), 0), L) is None

    def test_canonical_basis(self):
        L1 = QLattice([(2, 0), (0, 2), (1, 1)])
        L2 = QLattice([(1, 1), (1, -1)])
        assert L1 == L2
        assert hash(L1) == hash(L2)
        assert L1.rank == 2

    def test_containment(self):
        Z2 = QLattice([(1, 0), (0, 1)])
        half = QLattice([(Fraction(1, 2), 0), (0, 1)])
        assert half.contains(Z2)
        assert not Z2.contains(half)

    def test_dimension_checks(self):
        L = QLattice([(1, 0)])
        with pytest.raises(LatticeError):
            L.member((1, 0, 0))
        with pytest.raises(LatticeError):
            QLattice([(1, 0), (1,)])


class TestQuotient:
    def test_cyclic(self):
        q = quotient_invariants(QLattice([(2, 0), (0, 3)]), QLattice([(1, 0), (0, 1)]))
        assert q.torsion == (6,)
        assert q.torsion_order == 6
        assert q.describe() == "Z/6Z"
        assert not q.is_torsion_free

    def test_free_part(self):
        q = quotient_invariants(QLattice([(1, 0)], ambient_dim=2), QLattice([(1, 0), (0, 1)]))
        assert q.free_rank == 1
        assert q.is_torsion_free
        assert q.describe() == "Z"

    def test_not_contained(self):
        with pytest.raises(LatticeError):
            quotient_invariants(QLattice([(Fraction(1, 2), 0)]), QLattice([(1, 0), (0, 1)]))

    @given(int_matrices(2, 2, bound=30))
    def test_index_equals_determinant(self, A):
        det = A[0][0] * A[1][1] - A[0][1] * A[1][0]
        assume(det != 0)
        q = quotient_invariants(QLattice(A), QLattice([(1, 0), (0, 1)]))
        assert q.free_rank == 0
        assert q.torsion_order == abs(det)
