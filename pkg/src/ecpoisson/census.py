"""M_E(N) over the box family C(A, B) of curves y^2 = x^3 + a x + b.

Everything here is an exact enumeration: every curve in the box is reduced
at every relevant prime and its order is looked up, so histograms are exact
counts rather than estimates. Primes 2 and 3 and primes of bad reduction
never contribute to M_E(N).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from math import isqrt
from typing import Callable, Iterable

import numpy as np

from .arith import euler_phi, sieve_primes
from .classnum import class_sum, hurwitz_table12
from .constants import C_constant, K_constant, d_coeff, li_m
from .curves import check_prime_field, class_orders, curve_order, hasse_bounds

__all__ = [
    "FamilySpec",
    "PoissonRow",
    "CensusReport",
    "MomentReport",
    "SumCheck",
    "ClassSumReport",
    "hasse_interval",
    "hasse_primes",
    "m_e",
    "m_e_sum_check",
    "load_tables",
    "run_census",
    "poisson_compare",
    "moment_census",
    "avg_class_sum_check",
    "class_sum_ratios",
]

TableSource = Callable[[int], object]


def hasse_interval(N: int) -> tuple[int, int]:
    """Integers (lo, hi) such that lo < p < hi exactly when (p + 1 - N)^2 < 4p."""
    if N < 1:
        raise ValueError("N must be >= 1")
    r = isqrt(4 * N - 1) + 1  # ceil(2 sqrt N)
    return N + 1 - r, N + 1 + r


def hasse_primes(N: int, min_prime: int = 5) -> list[int]:
    lo, hi = hasse_interval(N)
    sieve = sieve_primes(max(hi, 2))
    return [int(p) for p in sieve.primes_between(lo, hi) if p >= min_prime]


@dataclass(frozen=True)
class FamilySpec:
    """Curves (a, b) with |a| <= A, |b| <= B and 4a^3 + 27b^2 != 0."""

    A: int
    B: int

    def __post_init__(self):
        if self.A < 1 or self.B < 1:
            raise ValueError("A and B must be positive")

    @property
    def singular_pairs(self) -> list[tuple[int, int]]:
        # 4a^3 = -27b^2 forces (a, b) = (-3k^2, 2k^3)
        out = []
        k = 0
        while 3 * k * k <= self.A and 2 * k**3 <= self.B:
            out.append((-3 * k * k, 2 * k**3))
            if k:
                out.append((-3 * k * k, -2 * k**3))
            k += 1
        return out

    @property
    def size(self) -> int:
        return (2 * self.A + 1) * (2 * self.B + 1) - len(self.singular_pairs)

    def blocks(self, block: int = 1024):
        """Yield (a, b) coordinate arrays per rectangular block, fixed order."""
        for a0 in range(-self.A, self.A + 1, block):
            a1 = min(a0 + block, self.A + 1)
            for b0 in range(-self.B, self.B + 1, block):
                b1 = min(b0 + block, self.B + 1)
                a, b = np.meshgrid(
                    np.arange(a0, a1, dtype=np.int64),
                    np.arange(b0, b1, dtype=np.int64),
                    indexing="ij",
                )
                a, b = a.ravel(), b.ravel()
                keep = 4 * a**3 + 27 * b**2 != 0
                yield a[keep], b[keep]

    def curves(self) -> tuple[np.ndarray, np.ndarray]:
        return next(self.blocks(2 * max(self.A, self.B) + 1))


def _require_nonsingular(a: int, b: int) -> None:
    if 4 * a**3 + 27 * b**2 == 0:
        raise ValueError(f"singular curve: (a, b) = ({a}, {b})")


def m_e(a: int, b: int, N: int) -> int:
    """Number of primes p > 3 of good reduction with |E_p(F_p)| = N."""
    _require_nonsingular(a, b)
    disc = 4 * a**3 + 27 * b**2
    return sum(
        1
        for p in hasse_primes(N)
        if disc % p and curve_order(p, a, b) == N
    )


@dataclass(frozen=True)
class SumCheck:
    sum: int
    pi_x: int
    delta: int
    excluded: int  # 2, 3 and bad primes with p below the largest candidate


def m_e_sum_check(a: int, b: int, x: int) -> SumCheck:
    """sum_{N <= x} M_E(N), counted prime by prime, against pi(x)."""
    _require_nonsingular(a, b)
    if x < 10:
        raise ValueError("x must be >= 10")
    disc = 4 * a**3 + 27 * b**2
    _, hi = hasse_interval(x)
    sieve = sieve_primes(hi)
    total = 0
    excluded = 0
    for p in sieve.primes[sieve.primes < hi]:
        p = int(p)
        if p <= 3 or disc % p == 0:
            excluded += 1
            continue
        if hasse_bounds(p)[1] <= x or curve_order(p, a, b) <= x:
            total += 1
    pi_x = sieve.pi(x)
    return SumCheck(total, pi_x, total - pi_x, excluded)


def load_tables(primes: Iterable[int], source: TableSource | None = None,
                workers: int = 1) -> dict[int, object]:
    """Order lookups for each prime, built in parallel, keyed in prime order."""
    source = source or class_orders
    primes = sorted(set(int(p) for p in primes))
    for p in primes:
        check_prime_field(p)
    if workers > 1 and len(primes) > 1:
        with ThreadPoolExecutor(workers) as pool:
            built = list(pool.map(source, primes))
    else:
        built = [source(p) for p in primes]
    return dict(zip(primes, built))


@dataclass(frozen=True)
class PoissonRow:
    ell: int
    empirical: float
    poisson_raw: float  # lambda^ell / ell!
    poisson: float  # lambda^ell e^{-lambda} / ell!
    ratio: float  # empirical / poisson


@dataclass
class CensusReport:
    N: int | tuple[int, int]
    family: FamilySpec
    histogram: dict[int, int]
    lam: float
    poisson_rows: list[PoissonRow] = field(default_factory=list)
    per_N: list[tuple[int, float, dict[int, int]]] = field(default_factory=list)
    excluded_bad_reduction: int = 0
    excluded_small_primes: int = 0

    @property
    def total(self) -> int:
        return sum(self.histogram.values())

    @property
    def lambdas(self) -> list[float]:
        return [lam for _, lam, _ in self.per_N] or [self.lam]


def _census_block(a, b, Ns, tables):
    """Histograms of M_E(N) for one block of curves and every N in Ns."""
    n_lo, n_hi = Ns[0], Ns[-1]
    width = n_hi - n_lo + 1
    cnt = len(a)
    flats = []
    bad = {}
    for p, tab in tables.items():
        o = np.asarray(tab.lookup(a, b), dtype=np.int64)
        bad[p] = int(np.count_nonzero(o == 0))
        hit = np.flatnonzero((o >= n_lo) & (o <= n_hi))
        flats.append(hit * width + (o[hit] - n_lo))
    flat = np.concatenate(flats) if flats else np.zeros(0, dtype=np.int64)
    M = np.bincount(flat, minlength=cnt * width).reshape(cnt, width)
    hists = {N: np.bincount(M[:, N - n_lo]) for N in Ns}
    return hists, bad


def _merge(target: dict[int, int], hist: np.ndarray) -> None:
    for ell, c in enumerate(hist.tolist()):
        if c:
            target[ell] = target.get(ell, 0) + int(c)


def run_census(family: FamilySpec, N: int | Iterable[int], workers: int = 1,
               tables: TableSource | None = None, block: int = 1024,
               ell_max: int | None = None) -> CensusReport:
    """Exact distribution of M_E(N) over the family.

    ``N`` may be one integer or an iterable of integers; several values are
    pooled into one histogram and compared against the uniform mixture of
    the per-N Poisson laws.
    """
    single = isinstance(N, (int, np.integer))
    Ns = [int(N)] if single else sorted(set(int(n) for n in N))
    if not Ns or Ns[0] < 1:
        raise ValueError("N must be positive")
    intervals = {n: hasse_primes(n) for n in Ns}
    primes = sorted(set(p for ps in intervals.values() for p in ps))
    lookups = load_tables(primes, tables, workers)

    blocks = list(family.blocks(block))
    work = lambda ab: _census_block(ab[0], ab[1], Ns, lookups)  # noqa: E731
    if workers > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(work, blocks))
    else:
        results = [work(ab) for ab in blocks]

    per_hist = {n: {} for n in Ns}
    bad = dict.fromkeys(primes, 0)
    for hists, bad_block in results:  # fixed block order
        for n in Ns:
            _merge(per_hist[n], hists[n])
        for p, c in bad_block.items():
            bad[p] += c

    size = family.size
    pooled: dict[int, int] = {}
    per_N = []
    for n in Ns:
        h = dict(sorted(per_hist[n].items()))
        for ell, c in h.items():
            pooled[ell] = pooled.get(ell, 0) + c
        per_N.append((n, sum(ell * c for ell, c in h.items()) / size, h))
    pooled = dict(sorted(pooled.items()))
    lam = sum(ell * c for ell, c in pooled.items()) / (size * len(Ns))

    small = sum(1 for n in Ns for q in (2, 3) if hasse_interval(n)[0] < q < hasse_interval(n)[1])
    report = CensusReport(
        N=Ns[0] if single else (Ns[0], Ns[-1]),
        family=family,
        histogram=pooled,
        lam=lam,
        per_N=per_N,
        excluded_bad_reduction=sum(bad[p] for n in Ns for p in intervals[n]),
        excluded_small_primes=small * size,
    )
    top = max(pooled) if pooled else 0
    report.poisson_rows = poisson_compare(report, ell_max if ell_max is not None else max(3, top))
    return report


def poisson_compare(report: CensusReport, ell_max: int) -> list[PoissonRow]:
    """Empirical Pr[M_E(N) = l] against the (mixture of) Poisson masses."""
    total = report.total
    lams = report.lambdas
    rows = []
    for ell in range(ell_max + 1):
        emp = report.histogram.get(ell, 0) / total
        raw = sum(lam**ell / math.factorial(ell) for lam in lams) / len(lams)
        ref = sum(lam**ell * math.exp(-lam) / math.factorial(ell) for lam in lams) / len(lams)
        rows.append(PoissonRow(ell, emp, raw, ref, emp / ref if ref else math.nan))
    return rows


@dataclass(frozen=True)
class MomentReport:
    x: int
    ell: int
    r: int
    gamma1: int
    empirical: float
    predicted: float
    family: FamilySpec
    terms: tuple[tuple[int, float, str, float], ...] = ()  # (m, C(m), d, Li_m)


def moment_census(family: FamilySpec, x: int, ell: int = 1, r: int = 1, gamma1: int = 0,
                  workers: int = 1, tables: TableSource | None = None,
                  block: int = 1024, prime_bound: int = 10**5) -> MomentReport:
    """Family average of sum_{N <= x, M_E(N) >= l} M_E(N)^r and its Li_m prediction."""
    if not 1 <= r <= ell:
        raise ValueError("need 1 <= r <= ell")
    if gamma1 < 0:
        raise ValueError("gamma1 must be >= 0")
    if x < 100:
        raise ValueError("x must be >= 100")
    _, hi = hasse_interval(x)
    primes = [int(p) for p in sieve_primes(hi).primes if 3 < p < hi]
    lookups = load_tables(primes, tables, workers)
    chunk = max(256, (1 << 22) // max(1, len(primes)))

    def work(ab):
        a, b = ab
        total = 0
        for lo in range(0, len(a), chunk):
            aa, bb = a[lo:lo + chunk], b[lo:lo + chunk]
            flats = []
            for tab in lookups.values():
                o = np.asarray(tab.lookup(aa, bb), dtype=np.int64)
                hit = np.flatnonzero((o > 0) & (o <= x))
                flats.append(hit * (x + 1) + o[hit])
            _, counts = np.unique(np.concatenate(flats), return_counts=True)
            counts = counts[counts >= ell].astype(np.int64)
            total += int(np.sum(counts**r))
        return total

    blocks = list(family.blocks(block))
    if workers > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(workers) as pool:
            totals = list(pool.map(work, blocks))
    else:
        totals = [work(ab) for ab in blocks]
    empirical = sum(totals) / family.size

    terms = []
    predicted = 0.0
    for m in range(ell, ell + gamma1 + 1):
        d = d_coeff(ell, r, m)
        c = C_constant(m, prime_bound).value
        li = li_m(x, m)
        terms.append((m, c, str(d), li))
        predicted += c * float(d) * li
    return MomentReport(x, ell, r, gamma1, empirical, predicted, family, tuple(terms))


@dataclass(frozen=True)
class ClassSumReport:
    x: int
    mean_abs_discrepancy: float
    mean_main_term: float
    ratio: float


def _main_term(N: int, prime_bound: int) -> float:
    return K_constant(N, prime_bound).value * N * N / (euler_phi(N) * math.log(N))


def avg_class_sum_check(x: int, prime_bound: int = 10**4) -> ClassSumReport:
    """(1/x) sum_{2 <= N <= x} |sum_p H(D_N(p)) - K(N) N^2 / (phi(N) log N)|."""
    if x < 100:
        raise ValueError("x must be >= 100")
    table = hurwitz_table12(4 * x + 8)
    disc = 0.0
    main = 0.0
    for N in range(2, x + 1):
        s = float(class_sum(N, table))
        t = _main_term(N, prime_bound)
        disc += abs(s - t)
        main += t
    return ClassSumReport(x, disc / x, main / x, disc / main)


def class_sum_ratios(n_max: int, n_min: int = 10) -> np.ndarray:
    """sum_p H(D_N(p)) / (N^2 / (phi(N) log N)) for n_min <= N <= n_max."""
    table = hurwitz_table12(4 * n_max + 8)
    return np.array([
        float(class_sum(N, table)) * euler_phi(N) * math.log(N) / (N * N)
        for N in range(n_min, n_max + 1)
    ])
