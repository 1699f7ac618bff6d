"""
End-to-end checks on the catalog systems: exact tower identities, group
computations and the eigenvalue battery.
"""

import random
from fractions import Fraction
from math import floor

import pytest

from cantorspectra.exactnum import RATIONALS, parse_element
from cantorspectra.intlattice import mat_vec, vec_mat
from cantorspectra.operations import (
    convergence_diagnostic,
    eigen_verdict,
    enumerate_paths,
    infinitesimal_report,
    lookup,
    rational_member,
    return_phase,
    stationary_measure,
    suffix_criterion,
    torsion_quotient,
)


def test_exact_tower_identities(fibonacci):
    measure = stationary_measure(fibonacci)
    assert sum((v * h for v, h in zip(measure.vector(1), fibonacci.heights(1))), measure.field.zero()) == 1
    rng = random.Random(40)
    for _ in range(50):
        m = rng.randint(1, fibonacci.levels - 1)
        n = rng.randint(m + 1, fibonacci.levels)
        P = fibonacci.products(n, m)
        assert fibonacci.heights(n) == mat_vec(fibonacci.matrix(n), fibonacci.heights(n - 1))
        assert mat_vec(P, fibonacci.heights(m)) == fibonacci.heights(n)
        assert vec_mat(measure.vector(n), P) == measure.vector(m)


def test_golden_torsion():
    I, E = lookup("sec43").groups()
    q = torsion_quotient(I, E)
    assert q.invariant_factors == (1, 2)
    assert q.torsion == (2,)


@pytest.mark.parametrize("k", range(2, 51))
def test_factorial_torsion_witnesses(k):
    I, E = lookup("sec42").groups(k)
    x = RATIONALS.from_rational(Fraction(1, k))
    assert I.contains(x)
    assert E.contains(x * k)
    assert not E.contains(x)


def test_dyadic_rational_subgroup(odometer2):
    for j in range(21):
        assert rational_member(odometer2, 1, 2 ** j).level == j + 1
    third = rational_member(odometer2, 1, 3)
    assert third.describe() == "CertifiedNonMember"


def test_fibonacci_battery(fibonacci, golden_angle):
    verdict, report = eigen_verdict(fibonacci, golden_angle, 2, 30)
    assert verdict.describe() == "PassesUpTo(30)"
    assert report.summability.terms[-1].hi < Fraction(1, 10 ** 6)
    assert report.suffix.deltas[30].hi < Fraction(1, 10 ** 6)
    assert Fraction(33, 100) <= report.summability.rho.lo
    assert report.summability.rho.hi <= Fraction(43, 100)

    verdict, _ = eigen_verdict(fibonacci, parse_element("(-1+sqrt(5))/4"), 2, 30)
    assert verdict.describe() == "RefutedNecessary(orthogonality)"
    verdict, _ = eigen_verdict(fibonacci, RATIONALS.from_rational(Fraction(1, 2)), 2, 30)
    assert verdict.describe() == "RefutedNecessary(rational-certified-non-member)"


def test_infinitesimal_verdicts(fibonacci, inf_demo):
    assert infinitesimal_report(fibonacci).verdict == "Trivial"
    report = infinitesimal_report(inf_demo)
    assert report.witness == (1, -1)
    mu = stationary_measure(inf_demo).vector(1)
    assert sum((x * c for x, c in zip(mu, report.witness)), RATIONALS.zero()) == 0
    for j in range(2, 21):
        assert any(mat_vec(inf_demo.products(j, 1), report.witness))


@pytest.mark.parametrize("alpha", [Fraction(1, 20), Fraction(1, 30)])
def test_suffix_sums_match_path_enumeration(small_explicit, alpha):
    element = RATIONALS.from_rational(alpha)
    deltas = suffix_criterion(small_explicit, element, 2).deltas
    paths = enumerate_paths(small_explicit, 3)
    for n in (1, 2):
        worst = Fraction(0)
        for path in paths:
            # alpha (r_{n+1} - r_n) = alpha <s_n, H_n>, reduced to [-1/2, 1/2)
            step = (return_phase(small_explicit, path, element, n + 1).lo
                    - return_phase(small_explicit, path, element, n).lo)
            step -= floor(step + Fraction(1, 2))
            worst = max(worst, abs(step))
        assert deltas[n].lo == deltas[n].hi == worst


def test_measure_convergence_series(fibonacci):
    result = convergence_diagnostic(fibonacci, 1, 40)
    assert result.terms[-1].hi < Fraction(1, 10 ** 8)
