"""Euler-product constants K(N) and C(m), the threshold coefficients
d_{l,r}(m) with their triangular linear system, Stirling numbers of the
second kind, and the logarithmic integrals Li_m(x) = int_2^x dt / log(t)^m.

Analytic constants are doubles with an explicit tail estimate; everything
combinatorial is exact (``Fraction``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial

import numpy as np

from .arith import euler_phi, factorize, sieve_primes

__all__ = [
    "TruncatedProduct",
    "CoeffTable",
    "K_constant",
    "K_local_factor",
    "f_m",
    "C_constant",
    "moment_of_density",
    "stirling2",
    "stirling_identity",
    "d_coeff",
    "coeff_table",
    "relation_matrices",
    "solve_relation_system",
    "li_m",
    "li_m_estimate",
]


@dataclass(frozen=True)
class TruncatedProduct:
    value: float
    prime_bound: int
    tail_estimate: float


def _tail(value: float, prime_bound: int) -> float:
    # |log local factor| <= 2/p^2 summed as int_B^inf 2/t^2 dt
    return abs(value) * math.expm1(2.0 / prime_bound)


def K_local_factor(N: int, p: int) -> Fraction:
    """Exact local factor of K(N) at the prime p."""
    if N % p == 0:
        nu = factorize(N).valuation(p)
        return 1 - Fraction(1, p**nu * (p - 1))
    # kronecker(N - 1, p)^2 is 1 unless p | N - 1
    chi2 = 0 if (N - 1) % p == 0 else 1
    return 1 - Fraction(chi2 * p + 1, (p - 1) ** 2 * (p + 1))


def K_constant(N: int, prime_bound: int = 10**4) -> TruncatedProduct:
    """K(N) with the p | N factors taken exactly and p not dividing N cut at the bound.

    N = 1 is accepted (every prime then divides N - 1).
    """
    if N < 1:
        raise ValueError("K(N) needs N >= 1")
    if prime_bound < 100:
        raise ValueError("prime_bound must be at least 100")
    P = sieve_primes(prime_bound).primes
    Pf = P.astype(np.float64)
    divides = (N % P) == 0
    chi2 = ((N - 1) % P != 0).astype(np.float64)
    local = 1.0 - (chi2 * Pf + 1.0) / ((Pf - 1.0) ** 2 * (Pf + 1.0))
    logk = float(np.sum(np.log(local[~divides])))
    for q, nu in factorize(N):
        logk += math.log1p(-1.0 / (q**nu * (q - 1)))
    value = math.exp(logk)
    return TruncatedProduct(value, prime_bound, _tail(value, prime_bound))


def _power_diff(eps_hi, eps_lo, m):
    """(1 - eps_hi)^m - (1 - eps_lo)^m without cancellation trouble."""
    return np.expm1(m * np.log1p(-eps_hi)) - np.expm1(m * np.log1p(-eps_lo))


def _f_m_array(P: np.ndarray, m: int, j_max: int) -> tuple[np.ndarray, np.ndarray]:
    """f_m(p) for an array of primes plus a bound on the dropped j > j_max terms."""
    P = P.astype(np.float64)
    j = np.arange(2, j_max + 1, dtype=np.float64)[None, :]
    pj = P[:, None] ** (-j)
    out = np.empty_like(P)
    pref = np.empty_like(P)
    two = P == 2
    if two.any():
        s = np.sum(pj[two] * _power_diff(pj[two], 2.0 * pj[two], m), axis=1)
        out[two] = 0.5 * ((2.0 / 3.0) ** m - 1.0) + 2.0**m * s
        pref[two] = 2.0**m
    odd = ~two
    if odd.any():
        q = P[odd]
        X = 1.0 - 1.0 / (q - 1.0) ** 2
        ratio = q / (q - 1.0)
        head = (
            X ** (-m)
            * (
                (1.0 - 1.0 / ((q - 1.0) ** 2 * (q + 1.0))) ** m
                + ratio**m * (1.0 - 1.0 / (q * (q - 1.0))) ** m
            )
            - 2.0
        ) / q
        pjo = pj[odd]
        c = (q - 1.0)[:, None]
        s = np.sum(pjo * _power_diff(pjo / c, pjo * q[:, None] / c, m), axis=1)
        pref[odd] = ratio**m * X ** (-m)
        out[odd] = head + pref[odd] * s
    # each dropped term is at most m p^{-2j} before the prefactor
    tail = pref * m * P ** (-2.0 * (j_max + 1)) / (1.0 - P**-2.0)
    return out, tail


def f_m(p: int, m: int, j_max: int = 64) -> float:
    """Local correction f_m(p) in the Euler product for C(m)."""
    if m < 1:
        raise ValueError("m must be >= 1")
    if j_max < 10:
        raise ValueError("j_max must be at least 10")
    val, _ = _f_m_array(np.array([p]), m, j_max)
    return float(val[0])


def C_constant(m: int, prime_bound: int = 10**5, j_max: int = 64) -> TruncatedProduct:
    """C(m) = prod_{p>2} (1 - 1/(p-1)^2)^m prod_p (1 + f_m(p)), truncated at the bound.

    The tail estimate is the 2/p^2 bound on the dropped local factors, valid
    while m(m - 1) <= 4 * prime_bound, plus the truncated j-sums of f_m.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if prime_bound < 1000:
        raise ValueError("prime_bound must be at least 1000")
    P = sieve_primes(prime_bound).primes
    f, jtail = _f_m_array(P, m, j_max)
    odd = P[1:].astype(np.float64)
    logc = m * float(np.sum(np.log1p(-1.0 / (odd - 1.0) ** 2))) + float(np.sum(np.log1p(f)))
    value = math.exp(logc)
    tail = _tail(value, prime_bound) + value * float(np.sum(jtail / (1.0 + f)))
    return TruncatedProduct(value, prime_bound, tail)


def moment_of_density(m: int, x: int, prime_bound: int = 10**4) -> float:
    """(1/x) sum_{N <= x} (N K(N) / phi(N))^m with K truncated at ``prime_bound``."""
    total = math.fsum(
        (N * K_constant(N, prime_bound).value / euler_phi(N)) ** m for N in range(1, x + 1)
    )
    return total / x


@lru_cache(maxsize=None)
def _stirling_row(n: int) -> tuple[int, ...]:
    if n == 0:
        return (1,)
    prev = _stirling_row(n - 1) + (0,)
    return tuple((k * prev[k] if k else 0) + (prev[k - 1] if k else 0) for k in range(n + 1))


def stirling2(n: int, m: int) -> int:
    """S(n, m): partitions of an n-set into m nonempty blocks."""
    if n < 0 or m < 0:
        raise ValueError("stirling2 needs n, m >= 0")
    if m > n:
        return 0
    for k in range(n):  # build rows bottom-up, keeps recursion shallow
        _stirling_row(k)
    return _stirling_row(n)[m]


def stirling_identity(r: int, j: int) -> bool:
    """Check sum_{m=1}^r S(r, m) j!/(j - m)! == j^r (falling factorials)."""
    lhs = 0
    for m in range(1, r + 1):
        falling = 1
        for i in range(m):
            falling *= j - i
        lhs += stirling2(r, m) * falling
    return lhs == j**r


def d_coeff(ell: int, r: int, m: int) -> Fraction:
    """d_{l,r}(m) = sum_{k=l}^m k^r/k! * (-1)^(m-k)/(m-k)!."""
    if not 1 <= r <= ell <= m:
        raise ValueError(f"d_coeff needs 1 <= r <= ell <= m, got ({ell}, {r}, {m})")
    return sum(
        (Fraction(k**r, factorial(k)) * Fraction((-1) ** (m - k), factorial(m - k))
         for k in range(ell, m + 1)),
        Fraction(0),
    )


@dataclass(frozen=True)
class CoeffTable:
    ell: int
    r: int
    values: dict[int, Fraction]


def coeff_table(ell: int, r: int, m_max: int) -> CoeffTable:
    return CoeffTable(ell, r, {m: d_coeff(ell, r, m) for m in range(ell, m_max + 1)})


def relation_matrices(size: int) -> tuple[list[list[Fraction]], list[list[Fraction]]]:
    """A with a_mn = 1/(m-n)! below the diagonal and its inverse b_mn = (-1)^(m-n) a_mn."""
    A = [[Fraction(1, factorial(i - k)) if i >= k else Fraction(0) for k in range(size)]
         for i in range(size)]
    B = [[A[i][k] if (i - k) % 2 == 0 else -A[i][k] for k in range(size)] for i in range(size)]
    return A, B


def _matmul(X, Y):
    n = len(Y[0])
    return [[sum((row[k] * Y[k][c] for k in range(len(Y))), Fraction(0)) for c in range(n)]
            for row in X]


def solve_relation_system(ell: int, r: int, size: int) -> dict[int, Fraction]:
    """Solve sum_{l <= n <= j} z(n)/(j - n)! = j^r/j! for j = l .. l + size - 1.

    Forward substitution on the unit lower-triangular system, cross-checked
    against the closed-form inverse.
    """
    if size < 1:
        raise ValueError("size must be >= 1")
    A, B = relation_matrices(size)
    J = [Fraction((ell + i) ** r, factorial(ell + i)) for i in range(size)]
    z: list[Fraction] = []
    for i in range(size):
        z.append(J[i] - sum((A[i][k] * z[k] for k in range(i)), Fraction(0)))
    zb = [row[0] for row in _matmul(B, [[v] for v in J])]
    if zb != z:
        raise ArithmeticError("closed-form inverse disagrees with forward substitution")
    return {ell + i: v for i, v in enumerate(z)}


def _simpson(f, a, fa, b, fb):
    m = 0.5 * (a + b)
    fm = f(m)
    return m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb)


def li_m_estimate(x: float, m: int, tol: float = 1e-8) -> tuple[float, float]:
    """Adaptive Simpson for int_2^x dt/log(t)^m; returns (value, error estimate)."""
    if x < 2:
        raise ValueError("li_m needs x >= 2")
    if m < 1:
        raise ValueError("li_m needs m >= 1")
    if x == 2:
        return 0.0, 0.0

    def f(t):
        return math.log(t) ** -m

    # geometric initial panels: the integrand is steepest just above t = 2
    edges = np.geomspace(2.0, x, 17)
    edges[0], edges[-1] = 2.0, x
    panel_tol = tol / 16
    parts, errs = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        fa, fb = f(a), f(b)
        mid, fm, whole = _simpson(f, a, fa, b, fb)
        stack = [(a, fa, mid, fm, b, fb, whole, panel_tol, 0)]
        while stack:
            a0, fa0, m0, fm0, b0, fb0, whole0, eps, depth = stack.pop()
            lm, flm, left = _simpson(f, a0, fa0, m0, fm0)
            rm, frm, right = _simpson(f, m0, fm0, b0, fb0)
            delta = left + right - whole0
            if abs(delta) <= 15.0 * eps or depth >= 50:
                parts.append(left + right + delta / 15.0)
                errs.append(abs(delta) / 15.0)
            else:
                stack.append((a0, fa0, lm, flm, m0, fm0, left, eps / 2, depth + 1))
                stack.append((m0, fm0, rm, frm, b0, fb0, right, eps / 2, depth + 1))
    return math.fsum(parts), math.fsum(errs)


def li_m(x: float, m: int, tol: float = 1e-8) -> float:
    return li_m_estimate(x, m, tol)[0]
