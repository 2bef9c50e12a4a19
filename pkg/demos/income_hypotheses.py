"""What a yes/no question about income costs to ask precisely.

States are income levels 20000..80000.  Testing "income >= 50000" only
requires separating states across one faraway boundary; testing "income
is even" pits every state against its immediate neighbors, where the
inverse-square price of discrimination is at its steepest.  The partition
coefficient is the price multiplier of an alpha-accurate test.
"""

import time

from infocost import (
    Hypothesis,
    StateSpace,
    hypothesis_test_cost,
    inverse_square_betas,
    partition_coefficient,
)

values = range(20000, 80001)
states = StateSpace(tuple(str(v) for v in values), values)
beta = inverse_square_betas(states, 1.0)

threshold = Hypothesis(
    states, frozenset(i for i, v in enumerate(states.values) if v >= 50000)
)
parity = Hypothesis(
    states, frozenset(i for i, v in enumerate(states.values) if v % 2 == 0)
)

t0 = time.perf_counter()
for name, h in (("income >= 50000", threshold), ("income even", parity)):
    coef = partition_coefficient(beta, h)
    test90 = hypothesis_test_cost(beta, h, 0.9)
    print(f"{name:>16}: coefficient {coef:12.4f}   90%-accurate test {test90:12.4f}")
print(f"{states.n} states, {time.perf_counter() - t0:.2f}s")
print()
print("Parity costs ~6600x the threshold: nearly every crossing pair is at")
print("distance 1, while threshold crossings are mostly far apart and the")
print("inverse-square prices of distant pairs vanish.")
