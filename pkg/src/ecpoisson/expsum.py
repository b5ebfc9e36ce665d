"""Complete additive character sums sum_{x mod p} e(g(x)/p) and the Weil bound
|sum| <= (n - 1) sqrt(p) for a degree-n polynomial with 0 < n < p and p not
dividing the leading coefficient.

Coefficient lists are in ascending order: ``coefficients[i]`` multiplies x^i.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from math import comb

import numpy as np

from .arith import is_prime, sieve_primes

__all__ = ["ExpSumResult", "poly_values", "exp_sum", "shift_poly", "substitute_affine", "random_cases"]


@dataclass(frozen=True)
class ExpSumResult:
    p: int
    coefficients: tuple[int, ...]
    magnitude: float
    bound: float
    passed: bool


def poly_values(p: int, coefficients) -> np.ndarray:
    """g(x) mod p for x = 0..p-1 by Horner's rule in exact int64 arithmetic."""
    x = np.arange(p, dtype=np.int64)
    acc = np.zeros(p, dtype=np.int64)
    for c in reversed(list(coefficients)):
        acc = (acc * x + int(c) % p) % p
    return acc


def exp_sum(p: int, coefficients) -> ExpSumResult:
    coeffs = tuple(int(c) for c in coefficients)
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    n = len(coeffs) - 1
    if not 0 < n < p:
        raise ValueError(f"degree {n} must satisfy 0 < n < p = {p}")
    if coeffs[-1] % p == 0:
        raise ValueError("leading coefficient divisible by p")
    theta = poly_values(p, coeffs) * (2.0 * math.pi / p)
    re = math.fsum(np.cos(theta).tolist())
    im = math.fsum(np.sin(theta).tolist())
    mag = math.hypot(re, im)
    bound = (n - 1) * math.sqrt(p)
    return ExpSumResult(p, coeffs, mag, bound, mag <= bound + 1e-6)


def shift_poly(coefficients, c: int) -> list[int]:
    out = list(coefficients)
    out[0] += c
    return out


def substitute_affine(coefficients, a: int, b: int) -> list[int]:
    """Coefficients of g(a x + b) over the integers."""
    n = len(coefficients) - 1
    out = [0] * (n + 1)
    for k, c in enumerate(coefficients):
        # c (a x + b)^k
        for i in range(k + 1):
            out[i] += c * comb(k, i) * a**i * b ** (k - i)
    return out


def random_cases(count: int, seed: int, p_max: int = 211, degrees=(2, 6)):
    """Reproducible (p, coefficients) pairs with 5 <= p <= p_max, 0 < deg < p."""
    rng = random.Random(seed)
    primes = [int(q) for q in sieve_primes(p_max).primes if q >= 5]
    cases = []
    while len(cases) < count:
        p = rng.choice(primes)
        n = rng.randint(degrees[0], degrees[1])
        if n >= p:
            continue
        coeffs = [rng.randrange(p) for _ in range(n)] + [rng.randrange(1, p)]
        cases.append((p, coeffs))
    return cases
