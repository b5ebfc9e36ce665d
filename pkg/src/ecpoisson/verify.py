"""Self-check suites exposed through ``ecpoisson verify``.

Each suite returns a ``SuiteResult`` whose ``failures`` carry enough detail
(exact rationals where applicable) to reproduce the failing case.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .arith import sieve_primes
from .census import FamilySpec, m_e, run_census
from .classnum import deuring_check
from .constants import (
    C_constant,
    K_constant,
    d_coeff,
    relation_matrices,
    _matmul,
    solve_relation_system,
    stirling_identity,
)
from .curves import hasse_bounds, iso_classes, is_singular
from .expsum import exp_sum, random_cases


@dataclass
class SuiteResult:
    name: str
    cases: int = 0
    failures: list[str] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def summary(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"{tag} {len(self.failures)} failures ({self.cases} cases, suite {self.name})"


def _primes(lo: int, hi: int) -> list[int]:
    return [int(p) for p in sieve_primes(hi).primes if lo <= p <= hi]


def supersingular_table(pmax: int = 199) -> list[dict]:
    """H(D) against the weighted class count at N = p + 1 (report only)."""
    rows = []
    for p in _primes(5, pmax):
        r = deuring_check(p, p + 1)
        rows.append({"p": p, "N": p + 1, "H": str(r.H), "weighted": str(r.weighted),
                     "equal": r.equal})
    return rows


def suite_deuring(pmax: int = 199) -> SuiteResult:
    res = SuiteResult("deuring")
    for p in _primes(5, pmax):
        lo, hi = hasse_bounds(p)
        for N in range(lo, hi + 1):
            if N == p + 1:
                continue
            res.cases += 1
            r = deuring_check(p, N)
            if not r.equal:
                res.failures.append(f"p={p} N={N} H={r.H} weighted={r.weighted}")
    bad = [row for row in supersingular_table(pmax) if not row["equal"]]
    res.notes.append(f"N = p+1 report-only: {len(bad)} discrepancies")
    return res


def suite_mass(pmax: int = 199) -> SuiteResult:
    res = SuiteResult("mass")
    for p in _primes(5, pmax):
        res.cases += 1
        mass = sum((Fraction(1, c.aut) for c in iso_classes(p)), Fraction(0))
        if mass != p:
            res.failures.append(f"p={p} sum 1/#Aut = {mass}")
        singular = sum(is_singular(p, s, t) for s in range(p) for t in range(p))
        if singular != p:
            res.failures.append(f"p={p} singular pairs = {singular}")
    return res


def suite_combinatorics(max_size: int = 12) -> SuiteResult:
    res = SuiteResult("combinatorics")
    for ell in range(1, 7):
        for r in range(1, ell + 1):
            z = solve_relation_system(ell, r, 7)
            for m, v in z.items():
                res.cases += 1
                if d_coeff(ell, r, m) != v:
                    res.failures.append(f"d_{{{ell},{r}}}({m}) = {d_coeff(ell, r, m)} != {v}")
    for size in range(1, max_size + 1):
        res.cases += 1
        A, B = relation_matrices(size)
        eye = [[Fraction(int(i == k)) for k in range(size)] for i in range(size)]
        if _matmul(A, B) != eye:
            res.failures.append(f"A*B != I at size {size}")
    for r in range(1, 9):
        for j in range(0, max_size + 1):
            res.cases += 1
            if not stirling_identity(r, j):
                res.failures.append(f"Stirling identity fails at r={r} j={j}")
    res.cases += 1
    if d_coeff(1, 1, 1) != 1:
        res.failures.append(f"d_{{1,1}}(1) = {d_coeff(1, 1, 1)}")
    for m in range(2, 11):
        res.cases += 1
        if d_coeff(1, 1, m) != 0:
            res.failures.append(f"d_{{1,1}}({m}) = {d_coeff(1, 1, m)}")
    return res


def suite_weil(cases: int = 1000, seed: int = 7) -> SuiteResult:
    res = SuiteResult("weil")
    for p, coeffs in random_cases(cases, seed):
        res.cases += 1
        r = exp_sum(p, coeffs)
        if not r.passed:
            res.failures.append(f"p={p} g={coeffs} |S|={r.magnitude!r} bound={r.bound!r}")
    return res


def suite_constants(prime_bound: int = 10**5) -> SuiteResult:
    res = SuiteResult("constants")
    c1 = C_constant(1, prime_bound)
    res.cases += 1
    if abs(c1.value - 1.0) > 5e-3:
        res.failures.append(f"C(1) = {c1.value!r}")
    res.notes.append(f"C(1) = {c1.value!r} (tail {c1.tail_estimate:.2e})")
    for N in range(1, 201):
        res.cases += 1
        coarse, fine = K_constant(N, 1000), K_constant(N, 10**4)
        if not fine.value > 0:
            res.failures.append(f"K({N}) = {fine.value!r}")
        if abs(coarse.value - fine.value) > coarse.tail_estimate:
            res.failures.append(f"K({N}) refinement moved {abs(coarse.value - fine.value):.3e}")
    return res


def suite_oracle_census(A: int = 10, Ns=(9, 30, 60)) -> SuiteResult:
    """Vectorised census against the per-curve point-counting loop."""
    res = SuiteResult("oracle-census")
    fam = FamilySpec(A, A)
    a, b = fam.curves()
    for N in Ns:
        res.cases += 1
        naive: dict[int, int] = {}
        for ai, bi in zip(a.tolist(), b.tolist()):
            k = m_e(ai, bi, N)
            naive[k] = naive.get(k, 0) + 1
        got = run_census(fam, N).histogram
        if dict(sorted(naive.items())) != got:
            res.failures.append(f"N={N} census {got} != naive {dict(sorted(naive.items()))}")
    return res


SUITES = {
    "deuring": suite_deuring,
    "mass": suite_mass,
    "combinatorics": suite_combinatorics,
    "weil": suite_weil,
    "constants": suite_constants,
    "oracle-census": suite_oracle_census,
}
