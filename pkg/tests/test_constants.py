import math
from fractions import Fraction
from math import factorial

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from ecpoisson.arith import euler_phi, sieve_primes
from ecpoisson.constants import (
    C_constant,
    K_constant,
    K_local_factor,
    coeff_table,
    d_coeff,
    f_m,
    li_m,
    li_m_estimate,
    moment_of_density,
    relation_matrices,
    solve_relation_system,
    stirling2,
    stirling_identity,
    _matmul,
)


# ---- K(N)

def test_K_local_factor_at_two_for_odd_N():
    for N in (3, 5, 7, 9, 101):
        assert K_local_factor(N, 2) == Fraction(2, 3)


def test_K_local_factors_in_unit_interval():
    for N in range(1, 300):
        for p in (2, 3, 5, 7, 11, 13):
            assert 0 < K_local_factor(N, p) <= 1


def test_K_matches_exact_partial_product():
    # exact rational product over p < 1000, then the float path on the same primes
    for N in (2, 5, 12, 360, 997):
        exact = math.prod(K_local_factor(N, int(p)) for p in sieve_primes(1000).primes)
        assert K_constant(N, 1000).value == pytest.approx(float(exact), rel=1e-12)


def test_K_refinement_5():
    coarse, fine = K_constant(5, 10**3), K_constant(5, 10**4)
    assert abs(coarse.value - fine.value) <= coarse.tail_estimate
    assert fine.tail_estimate < coarse.tail_estimate


def test_K_positive():
    assert all(K_constant(N, 10**4).value > 0 for N in range(2, 10**4 + 1, 7))


@given(st.integers(1, 10**6), st.sampled_from([100, 500, 1000, 5000]))
def test_K_doubling_within_tail(N, bound):
    a, b = K_constant(N, bound), K_constant(N, 2 * bound)
    assert abs(a.value - b.value) <= a.tail_estimate
    assert b.tail_estimate <= a.tail_estimate


def test_K_rejects_bad_input():
    with pytest.raises(ValueError):
        K_constant(0)
    with pytest.raises(ValueError):
        K_constant(5, 10)


# ---- C(m)

def f_m_oracle(p, m, terms=80):
    mpmath.mp.dps = 40
    p = mpmath.mpf(p)
    if p == 2:
        s = sum(2**-j * ((1 - p**-j) ** m - (1 - p ** -(j - 1)) ** m) for j in range(2, terms))
        return 0.5 * ((mpmath.mpf(2) / 3) ** m - 1) + 2**m * s
    X = 1 - 1 / (p - 1) ** 2
    r = p / (p - 1)
    head = (X ** -m * ((1 - 1 / ((p - 1) ** 2 * (p + 1))) ** m + r**m * (1 - 1 / (p * (p - 1))) ** m) - 2) / p
    s = sum(p**-j * ((1 - p**-j / (p - 1)) ** m - (1 - p ** (1 - j) / (p - 1)) ** m) for j in range(2, terms))
    return head + r**m * X ** -m * s


@pytest.mark.parametrize("p", [2, 3, 5, 7, 101])
@pytest.mark.parametrize("m", [1, 2, 3, 5])
def test_f_m_matches_high_precision_series(p, m):
    assert f_m(p, m) == pytest.approx(float(f_m_oracle(p, m)), rel=1e-12, abs=1e-15)


def test_f_1_at_two_vanishes():
    # the j-sum telescopes against the leading -1/6
    assert abs(f_m(2, 1)) < 1e-15


def test_f_m_decays_like_inverse_square():
    primes = sieve_primes(10**4).primes
    for m in (1, 2, 3):
        c_m = 2 * max(abs(f_m(int(p), m)) * p * p for p in primes[:15])
        for p in primes[15::25]:
            assert abs(f_m(int(p), m)) <= c_m / p**2


def test_C1_equals_one():
    c = C_constant(1, 10**5)
    assert abs(c.value - 1) <= 5e-3
    assert abs(c.value - 1) <= 1e-10


@pytest.mark.parametrize("m", [1, 2, 3, 4, 5])
def test_C_refinement(m):
    coarse, fine = C_constant(m, 10**3), C_constant(m, 10**4)
    assert abs(coarse.value - fine.value) <= coarse.tail_estimate


def test_C_increasing_in_m():
    vals = [C_constant(m, 10**4).value for m in range(1, 7)]
    assert all(a < b for a, b in zip(vals, vals[1:]))


def test_C2_against_empirical_moment():
    emp = moment_of_density(2, 10**4, 10**4)
    c = C_constant(2, 10**4).value
    assert abs(c - emp) / c <= 0.03


def test_C_rejects_bad_input():
    with pytest.raises(ValueError):
        C_constant(0)
    with pytest.raises(ValueError):
        C_constant(1, 100)
    with pytest.raises(ValueError):
        f_m(5, 1, j_max=3)


# ---- Stirling and d coefficients

def set_partitions(n):
    if n == 0:
        yield []
        return
    for part in set_partitions(n - 1):
        for i in range(len(part)):
            yield part[:i] + [part[i] + [n]] + part[i + 1:]
        yield part + [[n]]


def test_stirling_examples():
    assert stirling2(3, 2) == 3
    assert all(stirling2(n, n) == 1 for n in range(10))
    assert [stirling2(n, 0) for n in range(4)] == [1, 0, 0, 0]
    assert stirling2(2, 5) == 0


def test_stirling_matches_partitions():
    for n in range(0, 9):
        counts = {}
        for part in set_partitions(n):
            counts[len(part)] = counts.get(len(part), 0) + 1
        for m in range(0, n + 1):
            assert stirling2(n, m) == counts.get(m, 0)


def test_stirling_identity():
    assert stirling2(2, 1) * 3 + stirling2(2, 2) * 6 == 9
    assert stirling_identity(2, 3)
    assert all(stirling_identity(r, j) for r in range(1, 9) for j in range(0, 13))


def test_d_examples():
    assert d_coeff(1, 1, 1) == 1
    assert d_coeff(1, 1, 2) == 0 and d_coeff(1, 1, 3) == 0
    assert d_coeff(2, 1, 2) == 1
    assert d_coeff(2, 2, 3) == Fraction(-1, 2)
    assert solve_relation_system(2, 2, 2)[3] == Fraction(-1, 2)


def test_d11_vanishes_beyond_one():
    assert all(d_coeff(1, 1, m) == 0 for m in range(2, 11))


def test_d_diagonal():
    for ell in range(1, 8):
        for r in range(1, ell + 1):
            assert coeff_table(ell, r, ell + 3).values[ell] == Fraction(ell**r, factorial(ell))


def test_d_errors():
    for args in [(0, 1, 1), (2, 3, 4), (3, 1, 2), (1, 0, 1)]:
        with pytest.raises(ValueError):
            d_coeff(*args)


def test_d_generating_identity():
    for ell in range(1, 7):
        for r in range(1, ell + 1):
            for j in range(ell, ell + 11):
                lhs = sum(d_coeff(ell, r, n) / factorial(j - n) for n in range(ell, j + 1))
                assert lhs == Fraction(j**r, factorial(j))


def test_relation_system_matches_closed_form():
    for ell in range(1, 7):
        for r in range(1, ell + 1):
            z = solve_relation_system(ell, r, 7)
            assert z == {m: d_coeff(ell, r, m) for m in range(ell, ell + 7)}


def test_relation_inverse():
    for size in range(1, 13):
        A, B = relation_matrices(size)
        assert _matmul(A, B) == [[Fraction(int(i == k)) for k in range(size)] for i in range(size)]


# ---- Li_m

def trapezoid_li(x, m, h=1e-5):
    t = np.linspace(2.0, x, int(round((x - 2) / h)) + 1)
    y = np.log(t) ** -m
    return float(np.sum((y[1:] + y[:-1]) * np.diff(t)) / 2)


def test_li_at_two():
    assert all(li_m(2, m) == 0 for m in range(1, 6))


def test_li1_10_against_trapezoid():
    assert abs(li_m(10, 1) - trapezoid_li(10, 1)) <= 1e-4


@pytest.mark.parametrize("x", [3.0, 10.0, 100.0, 3000.0, 1e5])
def test_li1_against_mpmath(x):
    want = float(mpmath.li(x) - mpmath.li(2))
    assert li_m(x, 1) == pytest.approx(want, rel=1e-9)


@pytest.mark.parametrize("m", [2, 3, 6])
def test_li_m_against_mpmath_quad(m):
    mpmath.mp.dps = 30
    want = float(mpmath.quad(lambda t: mpmath.log(t) ** -m, [2, 3, 10, 100, 3000]))
    value, err = li_m_estimate(3000, m)
    assert value == pytest.approx(want, rel=1e-9)
    assert err < 1e-7


def test_li_errors():
    with pytest.raises(ValueError):
        li_m(1.5, 1)
    with pytest.raises(ValueError):
        li_m(10, 0)


def test_moment_of_density_phi_weights():
    # (1/x) sum N K(N)/phi(N), first moment, vs C(1) = 1, loose
    assert abs(moment_of_density(1, 2000, 1000) - 1) < 0.02
    assert euler_phi(1) == 1
