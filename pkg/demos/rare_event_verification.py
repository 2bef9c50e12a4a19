"""Confirming a rare event is cheap; ruling it out is not.

A black swan has prior probability epsilon.  A type-I experiment mostly
confirms the swan when it is there; a type-II experiment mostly clears
the field when it is not.  Both make the same size of error, yet their
log-likelihood-ratio costs split by a factor of about ln(1/epsilon):
verification scales like epsilon, falsification like epsilon ln(1/eps).
"""

import math

from infocost import verification_asymmetry

print(f"{'epsilon':>9} {'cost_I':>12} {'cost_II':>12} {'ratio':>8} {'ln(1/eps)':>10}")
for exponent in range(1, 7):
    eps = 10.0 ** -exponent
    cost_i, cost_ii = verification_asymmetry(eps, 1.0)
    print(
        f"{eps:>9.0e} {cost_i:>12.6g} {cost_ii:>12.6g} "
        f"{cost_ii / cost_i:>8.3f} {math.log(1.0 / eps):>10.3f}"
    )

print()
print("cost_I tracks epsilon itself; the ratio tracks ln(1/epsilon) with an")
print("O(1) deficit, so the asymmetry diverges as the event gets rarer.")
