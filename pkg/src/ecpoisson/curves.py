"""Short Weierstrass curves y^2 = x^3 + s x + t over F_p, p > 3.

Three independent routes to group orders live here:

* :func:`curve_order` - the Legendre-symbol sum over x, O(p) per curve;
* :class:`ClassOrders` - one order per isomorphism class plus twist
  bookkeeping, built from three cyclic correlations in O(p log p);
* :func:`iso_classes` - explicit orbit walking under (s, t) -> (s u^4, t u^6).

:class:`OrderTable` is the dense p x p table expanded from ``ClassOrders``.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd, isqrt

import numpy as np

from .arith import is_prime, legendre_table

__all__ = [
    "CurveFp",
    "ClassOrders",
    "OrderTable",
    "IsoClass",
    "TableBudgetError",
    "DEFAULT_TABLE_BUDGET",
    "check_prime_field",
    "is_singular",
    "curve_order",
    "count_points",
    "aut_count",
    "j_invariant",
    "class_orders",
    "build_order_table",
    "iso_classes",
    "weighted_count_with_order",
    "hasse_bounds",
]

MAGIC = b"EOT1"
SENTINEL = 0
DEFAULT_TABLE_BUDGET = 256 * 1024 * 1024


class TableBudgetError(ValueError):
    """A dense order table would not fit the configured memory budget."""

    def __init__(self, p: int, required: int, budget: int):
        super().__init__(
            f"order table for p={p} needs {required} bytes, budget is {budget}"
        )
        self.p = p
        self.required = required
        self.budget = budget


def check_prime_field(p: int) -> None:
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if p <= 3:
        raise ValueError(f"small characteristic: p={p} (need p > 3)")


def is_singular(p: int, s: int, t: int) -> bool:
    return (4 * s**3 + 27 * t**2) % p == 0


def _checked(p: int, s: int, t: int) -> tuple[int, int]:
    check_prime_field(p)
    s, t = s % p, t % p
    if is_singular(p, s, t):
        raise ValueError(f"singular reduction: (s, t) = ({s}, {t}) mod {p}")
    return s, t


@dataclass(frozen=True)
class CurveFp:
    p: int
    s: int
    t: int

    def __post_init__(self):
        s, t = _checked(self.p, self.s, self.t)
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "t", t)

    @property
    def order(self) -> int:
        return curve_order(self.p, self.s, self.t)

    @property
    def aut(self) -> int:
        return aut_count(self.p, self.s, self.t)

    @property
    def j(self) -> int:
        return j_invariant(self.p, self.s, self.t)


def hasse_bounds(p: int) -> tuple[int, int]:
    """Smallest and largest N with (sqrt(p) - 1)^2 < N < (sqrt(p) + 1)^2."""
    r = isqrt(4 * p)  # floor(2 sqrt p); 4p is never a square
    return p + 1 - r, p + 1 + r


def curve_order(p: int, s: int, t: int) -> int:
    """|E_{s,t}(F_p)| = p + 1 + sum_x ((x^3 + s x + t) / p)."""
    s, t = _checked(p, s, t)
    chi = legendre_table(p)
    x = np.arange(p, dtype=np.int64)
    v = ((x * x % p) * x + s * x + t) % p
    return p + 1 + int(chi[v].sum(dtype=np.int64))


def count_points(p: int, s: int, t: int) -> int:
    """Point count by enumerating every (x, y) plus the point at infinity.

    Quadratic in p; kept as an oracle that shares nothing with the
    Legendre-sum path.
    """
    s, t = _checked(p, s, t)
    ys = {}
    for y in range(p):
        ys[y * y % p] = ys.get(y * y % p, 0) + 1
    return 1 + sum(ys.get((x**3 + s * x + t) % p, 0) for x in range(p))


def aut_count(p: int, s: int, t: int) -> int:
    """#{u in F_p^* : s u^4 = s, t u^6 = t}."""
    s, t = _checked(p, s, t)
    if s == 0:
        return gcd(6, p - 1)
    if t == 0:
        return gcd(4, p - 1)
    return 2


def j_invariant(p: int, s: int, t: int) -> int:
    s, t = _checked(p, s, t)
    num = 1728 * 4 * s**3
    den = (4 * s**3 + 27 * t**2) % p
    return num * pow(den, -1, p) % p


def _correlate(weights: np.ndarray, chi: np.ndarray) -> np.ndarray:
    """out[k] = sum_v weights[v] * chi[(v + k) mod p], exact for integer input."""
    p = len(chi)
    n = 1 << (2 * p - 1).bit_length()
    fw = np.fft.rfft(weights[::-1].astype(np.float64), n)
    fc = np.fft.rfft(np.concatenate([chi, chi]).astype(np.float64), n)
    full = np.fft.irfft(fw * fc, n)
    # index (p - 1) + k of the linear correlation holds lag k
    return np.rint(full[p - 1 : 2 * p - 1]).astype(np.int64)


@dataclass(frozen=True)
class ClassOrders:
    """Group orders for every (s, t) mod p, stored per isomorphism class.

    ``generic[k]`` is the order of (k, k); the pair (s, t) with st != 0 lies
    in the class of (k, k) for k = s^3 / t^2 when st is a square, and in its
    quadratic twist otherwise. ``row_s0[t]`` and ``col_t0[s]`` cover the
    j = 0 and j = 1728 lines directly. Index 0 of each array is unused.
    """

    p: int
    generic: np.ndarray = field(repr=False)
    row_s0: np.ndarray = field(repr=False)
    col_t0: np.ndarray = field(repr=False)
    inverse: np.ndarray = field(repr=False)

    def lookup(self, s, t) -> np.ndarray:
        """Orders for arrays of residues; 0 marks singular pairs."""
        p = self.p
        s = np.asarray(s, dtype=np.int64) % p
        t = np.asarray(t, dtype=np.int64) % p
        chi = legendre_table(p)
        out = np.zeros(np.broadcast(s, t).shape, dtype=np.int64)
        s, t = np.broadcast_arrays(s, t)
        both = (s != 0) & (t != 0)
        ss, tt = s[both], t[both]
        it = self.inverse[tt]
        k = (ss * ss % p) * ss % p * (it * it % p) % p
        n_k = self.generic[k]
        twisted = chi[ss * tt % p] < 0
        n = np.where(twisted, 2 * p + 2 - n_k, n_k)
        n[(4 * k + 27) % p == 0] = SENTINEL
        out[both] = n
        m = (s == 0) & (t != 0)
        out[m] = self.row_s0[t[m]]
        m = (t == 0) & (s != 0)
        out[m] = self.col_t0[s[m]]
        return out


def class_orders(p: int) -> ClassOrders:
    check_prime_field(p)
    return _class_orders(int(p))


@lru_cache(maxsize=32)
def _class_orders(p: int) -> ClassOrders:
    chi = legendre_table(p).astype(np.int64)
    x = np.arange(p, dtype=np.int64)
    cube = (x * x % p) * x % p

    # s = 0: sum_x chi(x^3 + t)
    w = np.bincount(cube, minlength=p)
    row_s0 = p + 1 + _correlate(w, chi)

    # t = 0: sum_{x != 0} chi(x) chi(x^2 + s)
    w = np.bincount((x[1:] * x[1:]) % p, weights=chi[1:], minlength=p)
    col_t0 = p + 1 + _correlate(w, chi)

    # (k, k): with c = x + 1 != 0, x^3 + k c = c (x^3 / c + k)
    c = x[1:]
    inv = np.zeros(p, dtype=np.int64)
    inv[1:] = [pow(int(v), -1, p) for v in c]
    xs = (c - 1) % p
    w = np.bincount(
        (xs * xs % p) * xs % p * inv[c] % p, weights=chi[c], minlength=p
    )
    generic = p + 1 + chi[p - 1] + _correlate(w, chi)

    for arr in (generic, row_s0, col_t0, inv):
        arr.setflags(write=False)
    return ClassOrders(p, generic, row_s0, col_t0, inv)


@dataclass(frozen=True)
class OrderTable:
    """Dense table ``orders[s, t] = |E_{s,t}(F_p)|`` with 0 on singular pairs."""

    p: int
    orders: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.orders.shape != (self.p, self.p):
            raise ValueError("order table has the wrong shape")

    def order(self, s: int, t: int) -> int:
        return int(self.orders[s % self.p, t % self.p])

    def lookup(self, s, t) -> np.ndarray:
        p = self.p
        return self.orders[np.asarray(s) % p, np.asarray(t) % p]

    @property
    def nonsingular_count(self) -> int:
        return int(np.count_nonzero(self.orders))

    @property
    def nbytes(self) -> int:
        return table_bytes(self.p)

    def to_bytes(self) -> bytes:
        body = np.ascontiguousarray(self.orders, dtype="<u4").tobytes()
        return MAGIC + struct.pack("<Q", self.p) + body

    @classmethod
    def from_bytes(cls, data: bytes) -> "OrderTable":
        if len(data) < 12 or data[:4] != MAGIC:
            raise ValueError("bad magic in order table file")
        (p,) = struct.unpack_from("<Q", data, 4)
        if len(data) != 12 + 4 * p * p:
            raise ValueError(
                f"order table for p={p} has {len(data)} bytes, "
                f"expected {12 + 4 * p * p}"
            )
        orders = np.frombuffer(data, dtype="<u4", offset=12).reshape(p, p)
        return cls(int(p), orders.astype(np.uint32))

    def __eq__(self, other):
        if not isinstance(other, OrderTable):
            return NotImplemented
        return self.p == other.p and np.array_equal(self.orders, other.orders)

    __hash__ = None


def table_bytes(p: int) -> int:
    return 12 + 4 * p * p


def build_order_table(p: int, budget: int = DEFAULT_TABLE_BUDGET) -> OrderTable:
    check_prime_field(p)
    need = table_bytes(p)
    if need > budget:
        raise TableBudgetError(p, need, budget)
    co = class_orders(p)
    orders = np.empty((p, p), dtype=np.uint32)
    t = np.arange(p, dtype=np.int64)
    step = max(1, (1 << 21) // p)
    for lo in range(0, p, step):
        s = np.arange(lo, min(p, lo + step), dtype=np.int64)[:, None]
        orders[lo : lo + step] = co.lookup(s, t[None, :])
    orders.setflags(write=False)
    return OrderTable(p, orders)


@dataclass(frozen=True)
class IsoClass:
    p: int
    representative: CurveFp
    class_size: int
    aut: int
    order: int


def iso_classes(p: int) -> list[IsoClass]:
    """F_p-isomorphism classes of y^2 = x^3 + s x + t by orbit walking."""
    check_prime_field(p)
    return list(_iso_classes(int(p)))


@lru_cache(maxsize=64)
def _iso_classes(p: int) -> tuple[IsoClass, ...]:
    u = np.arange(1, p, dtype=np.int64)
    u2 = u * u % p
    u4 = u2 * u2 % p
    u6 = u4 * u2 % p
    s_all = np.arange(p, dtype=np.int64)[:, None]
    t_all = np.arange(p, dtype=np.int64)[None, :]
    visited = (4 * s_all**3 + 27 * t_all**2) % p == 0
    chi = legendre_table(p)
    x = np.arange(p, dtype=np.int64)
    out = []
    for idx in np.flatnonzero(~visited.ravel()):
        s, t = divmod(int(idx), p)
        if visited[s, t]:
            continue
        os_, ot = s * u4 % p, t * u6 % p
        visited[os_, ot] = True
        size = len(np.unique(os_ * p + ot))
        v = ((x * x % p) * x + s * x + t) % p
        order = p + 1 + int(chi[v].sum(dtype=np.int64))
        rep = CurveFp(p, s, t)
        out.append(IsoClass(p, rep, size, (p - 1) // size, order))
    return tuple(out)


def weighted_count_with_order(p: int, N: int) -> Fraction:
    """Sum of 1/#Aut over F_p-isomorphism classes with exactly N points."""
    check_prime_field(p)
    lo, hi = hasse_bounds(p)
    if not lo <= N <= hi:
        return Fraction(0)
    return sum(
        (Fraction(1, c.aut) for c in iso_classes(p) if c.order == N), Fraction(0)
    )
