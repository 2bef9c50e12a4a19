"""Optimal information acquisition in a small portfolio decision.

Three states of the market, three positions.  The investor pays for
information by the log-likelihood-ratio cost: telling the flat market
from either neighbor is priced steeply, telling a crash from a boom is
nearly free.  The solved choice rule is the experiment the investor
runs; rows are states, columns are action probabilities.
"""

import numpy as np

from infocost import (
    BetaMatrix,
    DecisionProblem,
    StateSpace,
    foc_residual,
    solve_llr,
    solve_mutual_information,
)

states = StateSpace(("crash", "flat", "boom"))
actions = ("sell", "hold", "buy")
payoff = np.array(
    [
        [1.0, 0.1, -1.2],   # sell
        [0.2, 0.4, 0.2],    # hold
        [-1.0, 0.1, 1.3],   # buy
    ]
)
prior = np.array([0.25, 0.5, 0.25])
problem = DecisionProblem(states, actions, payoff, prior)

# beta_ij is the marginal price of discriminating i from j: adjacent
# market states are expensive to separate, the extremes are not
coef = np.array(
    [
        [0.0, 0.060, 0.008],
        [0.060, 0.0, 0.050],
        [0.008, 0.050, 0.0],
    ]
)
beta = BetaMatrix(states, coef)


def show(tag, result):
    print(tag)
    print(f"  {'':>6} " + " ".join(f"{a:>7}" for a in actions))
    for i, s in enumerate(states.labels):
        row = " ".join(f"{p:7.4f}" for p in result.rule.probs[i])
        print(f"  {s:>6} {row}")
    print(
        f"  objective {result.objective:.6f} = utility "
        f"{result.expected_utility:.6f} - cost {result.cost:.6f}"
    )


res = solve_llr(problem, beta)
show("log-likelihood-ratio cost:", res)
print(f"  stationarity residual {foc_residual(problem, beta, res.rule):.2e}")
print()
show("mutual information, lambda = 0.3:", solve_mutual_information(problem, 0.3))
print()
print("The llr investor acts decisively at the extremes and stays almost")
print("uniform in the flat market, where every distinction is expensive.")
print("The mi price has no notion of which states are close: its rule is a")
print("single action mix reweighted state by state through the payoffs.")
