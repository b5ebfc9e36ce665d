"""Class numbers of imaginary quadratic discriminants and the Kronecker
class number H(D) = sum over f^2 | D, D/f^2 = 0,1 mod 4 of h(D/f^2)/w(D/f^2).

The exact route counts primitive reduced forms. The analytic route sums the
Dirichlet series of the Kronecker character and exists only to cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd, isqrt

import numpy as np

from .arith import is_prime, kronecker_symbol
from .curves import check_prime_field, hasse_bounds, weighted_count_with_order

__all__ = [
    "FormClassCount",
    "ClassNumberRecord",
    "DiscOfTrace",
    "LApproximation",
    "DeuringResult",
    "is_discriminant",
    "unit_weight",
    "reduced_forms",
    "reduced_form_count",
    "class_number_table",
    "hurwitz_table12",
    "kronecker_H",
    "kronecker_H_via_L",
    "disc_of_order",
    "deuring_check",
    "class_sum",
]


def is_discriminant(d: int) -> bool:
    return d < 0 and d % 4 in (0, 1)


def _require_disc(d: int) -> None:
    if not is_discriminant(d):
        raise ValueError(f"not a discriminant: {d}")


def unit_weight(d: int) -> int:
    return {-3: 6, -4: 4}.get(d, 2)


@dataclass(frozen=True)
class FormClassCount:
    d: int
    h: int
    w: int


@dataclass(frozen=True)
class ClassNumberRecord:
    D: int
    terms: tuple[tuple[int, int, int, int], ...]  # (f, D/f^2, h, w)
    H: Fraction


@dataclass(frozen=True)
class DiscOfTrace:
    N: int
    p: int
    D: int


def reduced_forms(d: int) -> list[tuple[int, int, int]]:
    """Primitive reduced forms (a, b, c) with b^2 - 4ac = d."""
    _require_disc(d)
    out = []
    a = 1
    while 3 * a * a <= -d:
        for b in range(-a + 1, a + 1):
            if (b - d) % 2:
                continue
            num = b * b - d
            if num % (4 * a):
                continue
            c = num // (4 * a)
            if c < a or (c == a and b < 0):
                continue
            if gcd(gcd(a, b), c) == 1:
                out.append((a, b, c))
        a += 1
    return out


@lru_cache(maxsize=None)
def reduced_form_count(d: int) -> FormClassCount:
    return FormClassCount(d, len(reduced_forms(d)), unit_weight(d))


def class_number_table(limit: int) -> np.ndarray:
    """h[n] = h(-n) for every discriminant -n with n <= limit, 0 elsewhere.

    Bulk version of :func:`reduced_form_count`: walks (a, b) and vectorizes
    over c, so the cost is proportional to the total number of forms.
    """
    h = np.zeros(limit + 1, dtype=np.int64)
    a = 1
    while 3 * a * a <= limit:
        for b in range(-a + 1, a + 1):
            cmax = (limit + b * b) // (4 * a)
            if cmax < a:
                continue
            c = np.arange(a, cmax + 1, dtype=np.int64)
            if b < 0:
                c = c[c > a]
            c = c[np.gcd(np.gcd(a, abs(b)), c) == 1]
            h[4 * a * c - b * b] += 1  # distinct for distinct c
        a += 1
    return h


def hurwitz_table12(limit: int) -> np.ndarray:
    """H12[n] = 12 H(-n) (an integer) for 1 <= n <= limit."""
    h = class_number_table(limit)
    n = np.arange(limit + 1)
    weights = np.full(limit + 1, 6, dtype=np.int64)  # 12 / w with w = 2
    weights[3], weights[4] = 2, 3
    base = h * weights
    out = np.zeros(limit + 1, dtype=np.int64)
    for f in range(1, isqrt(limit) + 1):
        m = n[:: f * f][1:]  # multiples of f^2
        d = m // (f * f)
        ok = (d % 4 == 0) | (d % 4 == 3)
        out[m[ok]] += base[d[ok]]
    return out


def kronecker_H(D: int) -> ClassNumberRecord:
    _require_disc(D)
    return _kronecker_H(int(D))


@lru_cache(maxsize=None)
def _kronecker_H(D: int) -> ClassNumberRecord:
    terms = []
    total = Fraction(0)
    for f in range(1, isqrt(-D) + 1):
        if D % (f * f):
            continue
        d = D // (f * f)
        if d % 4 not in (0, 1):
            continue
        r = reduced_form_count(d)
        terms.append((f, d, r.h, r.w))
        total += Fraction(r.h, r.w)
    return ClassNumberRecord(D, tuple(terms), total)


@dataclass(frozen=True)
class LApproximation:
    value: float
    tail_estimate: float


def kronecker_H_via_L(D: int, cutoff: int = 10**5, accelerate: bool = True) -> LApproximation:
    """H(D) from sqrt|d| L(1, chi_d) / (2 pi) summed over the admissible f.

    Each L-series is summed over whole periods of chi_d up to ``cutoff``.
    With ``accelerate`` the leading tail term -S1/(q M), S1 = sum r chi(r)
    over one period q and M the truncation point, is added. The reported
    tail is the heuristic bound sum_f sqrt|d_f|/(2 pi) * |d_f| / cutoff.
    """
    _require_disc(D)
    if cutoff < 1000:
        raise ValueError("cutoff must be at least 1000")
    value = 0.0
    tail = 0.0
    for f in range(1, isqrt(-D) + 1):
        if D % (f * f):
            continue
        d = D // (f * f)
        if d % 4 not in (0, 1):
            continue
        q = -d
        chi = np.array([kronecker_symbol(d, r) for r in range(1, q + 1)], dtype=np.float64)
        reps = max(1, cutoff // q)
        M = reps * q
        n = np.arange(1, M + 1, dtype=np.float64)
        L = float(np.sum(np.tile(chi, reps) / n))
        if accelerate:
            s1 = float(np.dot(np.arange(1, q + 1), chi))
            L -= s1 / (q * M)
        scale = math.sqrt(q) / (2 * math.pi)
        value += scale * L
        tail += scale * q / cutoff
    return LApproximation(value, tail)


def disc_of_order(N: int, p: int) -> DiscOfTrace:
    D = (p + 1 - N) ** 2 - 4 * p
    assert D == (N + 1 - p) ** 2 - 4 * N
    if D >= 0:
        raise ValueError(f"p={p} outside Hasse interval of N={N}")
    return DiscOfTrace(N, p, D)


@dataclass(frozen=True)
class DeuringResult:
    H: Fraction
    weighted: Fraction
    equal: bool


def deuring_check(p: int, N: int) -> DeuringResult:
    check_prime_field(p)
    lo, hi = hasse_bounds(p)
    if not lo <= N <= hi:
        raise ValueError(f"N={N} outside Hasse interval of p={p}")
    H = kronecker_H(disc_of_order(N, p).D).H
    w = weighted_count_with_order(p, N)
    return DeuringResult(H, w, H == w)


def class_sum(N: int, table12: np.ndarray | None = None) -> Fraction:
    """Sum of H(D_N(p)) over primes p in the open Hasse interval of N."""
    from .census import hasse_interval

    lo, hi = hasse_interval(N)
    total = 0
    for p in range(max(lo + 1, 2), hi):
        if not is_prime(p):
            continue
        D = (p + 1 - N) ** 2 - 4 * p
        if table12 is not None:
            total += int(table12[-D])
        else:
            total += kronecker_H(D).H * 12
    return Fraction(total, 12)
