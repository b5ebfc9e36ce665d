"""
Point counts, twists and class numbers over a small prime field
===============================================================

Every nonsingular curve y^2 = x^3 + s x + t over F_p has an order in the
Hasse window. Weighting each isomorphism class by 1/#Aut, the classes with
a given order add up to a Kronecker class number.
"""

from fractions import Fraction

import numpy as np

from ecpoisson.classnum import kronecker_H
from ecpoisson.curves import build_order_table, hasse_bounds, iso_classes

p = 37
T = build_order_table(p)
print("nonsingular pairs:", T.nonsingular_count, "=", p * p - p)

# distribution of orders across all (s, t)
orders = T.orders[T.orders > 0]
vals, counts = np.unique(orders, return_counts=True)
for n, c in zip(vals, counts):
    print(f"{n:4d} {'#' * (c // 12)}")

# classes, automorphisms and the mass formula
classes = iso_classes(p)
print("classes:", len(classes), " sum 1/#Aut =", sum(Fraction(1, c.aut) for c in classes))

# per order: weighted class count against H((p+1-N)^2 - 4p)
lo, hi = hasse_bounds(p)
for N in range(lo, hi + 1):
    w = sum((Fraction(1, c.aut) for c in classes if c.order == N), Fraction(0))
    H = kronecker_H((p + 1 - N) ** 2 - 4 * p).H
    print(N, w, H, "ok" if w == H else "MISMATCH")
