"""
Euler products and the first moment
===================================

K(N) weights the expected number of primes with |E(F_p)| = N. Averaging
(N K(N)/phi(N))^m over N recovers the constants C(m); C(1) is exactly 1, so
the family average of sum_N M_E(N) tracks Li_1(x).
"""

from ecpoisson.census import FamilySpec, moment_census
from ecpoisson.constants import C_constant, K_constant, d_coeff, li_m, moment_of_density

for N in (5, 6, 7, 12, 30, 101):
    k = K_constant(N)
    print(f"K({N}) = {k.value:.6f}  (tail {k.tail_estimate:.1e})")

for m in (1, 2, 3, 4):
    c = C_constant(m).value
    emp = moment_of_density(m, 5000, 5000)
    print(f"C({m}) = {c:.6f}   empirical moment {emp:.6f}")

print("d_{2,1}(m):", [str(d_coeff(2, 1, m)) for m in range(2, 8)])

# x = 1000 keeps this quick; the acceptance run uses 3000 and a larger box
rep = moment_census(FamilySpec(100, 100), 1000)
print(f"family average {rep.empirical:.2f}, Li_1(1000) = {li_m(1000, 1):.2f}")
