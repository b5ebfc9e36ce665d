"""Exact censuses of elliptic curve group orders over prime fields.

For the box family of curves y^2 = x^3 + a x + b this package counts, for
each N, the primes p with |E(F_p)| = N, and compares the resulting
distribution with Poisson laws and with Euler-product constants.
"""

__version__ = "0.1.0"

from .arith import euler_phi, factorize, is_prime, kronecker_symbol, sieve_primes  # noqa: E402
from .curves import (  # noqa: E402
    CurveFp,
    OrderTable,
    TableBudgetError,
    build_order_table,
    class_orders,
    curve_order,
    iso_classes,
    weighted_count_with_order,
)
from .classnum import deuring_check, kronecker_H, kronecker_H_via_L  # noqa: E402
from .constants import C_constant, K_constant, d_coeff, li_m  # noqa: E402
from .census import FamilySpec, m_e, moment_census, run_census  # noqa: E402
from .expsum import exp_sum  # noqa: E402

__all__ = [
    "__version__",
    "euler_phi", "factorize", "is_prime", "kronecker_symbol", "sieve_primes",
    "CurveFp", "OrderTable", "TableBudgetError", "build_order_table", "class_orders",
    "curve_order", "iso_classes", "weighted_count_with_order",
    "deuring_check", "kronecker_H", "kronecker_H_via_L",
    "C_constant", "K_constant", "d_coeff", "li_m",
    "FamilySpec", "m_e", "moment_census", "run_census",
    "exp_sum",
]
