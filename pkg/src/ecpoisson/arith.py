"""Exact and modular integer arithmetic shared by the rest of the package.

Rationals are plain :class:`fractions.Fraction` objects; Python integers give
arbitrary precision for free, so there is no separate numeric type here.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import isqrt

import numpy as np

__all__ = [
    "Fraction",
    "PrimeSieve",
    "Factorization",
    "sieve_primes",
    "is_prime",
    "kronecker_symbol",
    "legendre_table",
    "factorize",
    "euler_phi",
]

Rational = Fraction


@dataclass(frozen=True)
class PrimeSieve:
    """Primes up to ``limit``; ``is_prime`` and ``primes`` are read-only arrays."""

    limit: int
    is_prime: np.ndarray = field(repr=False)
    primes: np.ndarray = field(repr=False)

    def __contains__(self, n: int) -> bool:
        return 0 <= n <= self.limit and bool(self.is_prime[n])

    def pi(self, x: float) -> int:
        """Number of primes <= x (x must not exceed ``limit``)."""
        if x > self.limit:
            raise ValueError(f"pi({x}) needs a sieve beyond {self.limit}")
        return int(np.searchsorted(self.primes, x, side="right"))

    def primes_between(self, lo: int, hi: int) -> np.ndarray:
        """Primes p with lo < p < hi (open interval)."""
        i = np.searchsorted(self.primes, lo, side="right")
        j = np.searchsorted(self.primes, hi, side="left")
        return self.primes[i:j]


def sieve_primes(limit: int) -> PrimeSieve:
    if limit < 2:
        raise ValueError("limit too small")
    return _sieve(int(limit))


@lru_cache(maxsize=16)
def _sieve(limit: int) -> PrimeSieve:
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for i in range(2, isqrt(limit) + 1):
        if flags[i]:
            flags[i * i :: i] = False
    primes = np.flatnonzero(flags).astype(np.int64)
    flags.setflags(write=False)
    primes.setflags(write=False)
    return PrimeSieve(limit, flags, primes)


def _small_primes(bound: int) -> np.ndarray:
    # round the sieve size up so repeated calls share cached sieves
    size = 1 << max(10, int(bound).bit_length())
    return _sieve(size).primes


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in _small_primes(isqrt(n) + 1):
        q = int(q)
        if q * q > n:
            break
        if n % q == 0:
            return n == q
    return True


def kronecker_symbol(a: int, n: int) -> int:
    """Kronecker symbol (a/n) for arbitrary integers.

    Conventions: (a/0) is 1 when |a| = 1 and 0 otherwise; for n < 0,
    (a/n) = (a/-1)(a/|n|) with (a/-1) = -1 exactly when a < 0; at 2,
    (a/2) is 0 for even a, 1 for a = +-1 mod 8 and -1 for a = +-3 mod 8.
    """
    a, n = int(a), int(n)
    if n == 0:
        return 1 if abs(a) == 1 else 0
    if a % 2 == 0 and n % 2 == 0:
        return 0
    k = 1
    if n < 0:
        n = -n
        if a < 0:
            k = -k
    v = (n & -n).bit_length() - 1
    n >>= v
    if v & 1 and a % 8 in (3, 5):
        k = -k
    # Jacobi symbol for odd n > 0
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                k = -k
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            k = -k
        a %= n
    return k if n == 1 else 0


@lru_cache(maxsize=64)
def legendre_table(p: int) -> np.ndarray:
    """Array chi with chi[v] = (v/p) for 0 <= v < p, p an odd prime."""
    chi = np.full(p, -1, dtype=np.int8)
    x = np.arange(1, p, dtype=np.int64)
    chi[(x * x) % p] = 1
    chi[0] = 0
    chi.setflags(write=False)
    return chi


@dataclass(frozen=True)
class Factorization:
    n: int
    factors: tuple[tuple[int, int], ...]

    def __iter__(self):
        return iter(self.factors)

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(q for q, _ in self.factors)

    def valuation(self, q: int) -> int:
        for r, e in self.factors:
            if r == q:
                return e
        return 0


def factorize(n: int) -> Factorization:
    """Trial division against a cached sieve; meant for n up to ~1e8."""
    n = int(n)
    if n < 1:
        raise ValueError("factorize needs n >= 1")
    m = n
    out = []
    for q in _small_primes(isqrt(n) + 1):
        q = int(q)
        if q * q > m:
            break
        if m % q == 0:
            e = 0
            while m % q == 0:
                m //= q
                e += 1
            out.append((q, e))
    if m > 1:
        out.append((m, 1))
    return Factorization(n, tuple(out))


def euler_phi(n: int) -> int:
    result = int(n)
    for q, _ in factorize(n):
        result -= result // q
    return result
