"""Desk-scale reproductions of the worked numerical examples.

Each function returns plot-ready rows; the command line wraps them in CSV.

* coinflip: LLR versus mutual-information cost of k independent biased
  coin flips.  The LLR column grows linearly without bound, the mutual
  information column saturates at ln 2.
* perception: psychometric curves for the dot-counting task, sigmoidal
  under the LLR cost and flat-per-side under mutual information.
* gdp: partition coefficients for two hypotheses about a GDP figure on the
  integer grid 20000..80000, a threshold (easy) and a parity (absurdly
  hard) question.
* swans: cost of verifying versus falsifying a rare-event claim across
  epsilon, exhibiting the log(1/eps) asymmetry.
"""

from __future__ import annotations

import math

import numpy as np

from .costs import (
    Hypothesis,
    inverse_square_betas,
    partition_coefficient,
    verification_asymmetry,
)
from .errors import UnknownReproduction, ValidationError
from .experiments import StateSpace
from .solver import psychometric_curve

Rows = list[tuple]


def _binomial_rows(k: int, p: float) -> tuple[np.ndarray, np.ndarray]:
    """Likelihoods of the count of heads in k flips, bias p and 1-p."""
    j = np.arange(k + 1)
    comb = np.array([math.comb(k, int(x)) for x in j], dtype=float)
    ph = comb * p**j * (1 - p) ** (k - j)
    pl = comb * (1 - p) ** j * p ** (k - j)
    return ph, pl


def coinflip_rows(k_max: int = 20, kappa: float = 1.0, lam: float = 1.0) -> Rows:
    """(k, llr_cost, mi_cost) for k = 1..k_max flips of a 0.8/0.2 coin.

    The count of heads is a sufficient statistic, so the k-flip experiment
    collapses to k+1 signals; costs are computed straight from those
    likelihood arrays.  Prices are kappa/2 per direction, prior uniform.
    """
    if k_max < 1:
        raise ValidationError(f"k = {k_max} must be at least 1")
    rows = []
    for k in range(1, k_max + 1):
        ph, pl = _binomial_rows(k, 0.8)
        llr = 0.5 * kappa * float(
            np.dot(ph, np.log(ph / pl)) + np.dot(pl, np.log(pl / ph))
        )
        marg = 0.5 * (ph + pl)
        post = 0.5 * ph / marg
        # extreme counts round the posterior to exactly 0 or 1 once k is
        # large; those signals carry zero entropy
        ent = np.zeros_like(post)
        inner = (post > 0.0) & (post < 1.0)
        pi = post[inner]
        ent[inner] = -(pi * np.log(pi) + (1 - pi) * np.log1p(-pi))
        mi = lam * float(math.log(2.0) - np.dot(marg, ent))
        rows.append((k, llr, mi))
    return rows


def perception_rows(r: int = 10, kappa: float = 1.0, lam: float = 1.0) -> Rows:
    """(state, P(guess R) under LLR, P(guess R) under MI) per state."""
    llr = psychometric_curve(r, kappa, "llr", lam)
    mi = psychometric_curve(r, kappa, "mi", lam)
    return [
        (row_l[0], row_l[2], row_m[2]) for row_l, row_m in zip(llr, mi)
    ]


def gdp_rows(kappa: float = 1.0) -> Rows:
    """Partition coefficients for the two GDP hypotheses.

    H1: GDP is at least 50000 (threshold).  H2: GDP is even (parity).
    Prices follow the unnormalized inverse-square rule kappa/(i-j)^2.
    """
    values = range(20000, 80001)
    states = StateSpace(tuple(str(v) for v in values), values)
    beta = inverse_square_betas(states, kappa)
    h1 = Hypothesis(
        states, frozenset(i for i, v in enumerate(states.values) if v >= 50000)
    )
    h2 = Hypothesis(
        states, frozenset(i for i, v in enumerate(states.values) if v % 2 == 0)
    )
    return [
        ("H1", partition_coefficient(beta, h1)),
        ("H2", partition_coefficient(beta, h2)),
    ]


_SWAN_GRID = (1e-1, 1e-2, 1e-3, 1e-4, 1e-5)


def swans_rows(kappa: float = 1.0, epsilon: float | None = None) -> Rows:
    """(epsilon, cost_I, cost_II, cost_II/cost_I) over an epsilon grid."""
    grid = _SWAN_GRID if epsilon is None else (float(epsilon),)
    rows = []
    for eps in grid:
        ci, cii = verification_asymmetry(eps, kappa)
        rows.append((eps, ci, cii, cii / ci))
    return rows


def reproduce_rows(
    name: str,
    kappa: float = 1.0,
    lam: float = 1.0,
    r: int = 10,
    k: int = 20,
    epsilon: float | None = None,
) -> tuple[tuple[str, ...], Rows]:
    """Dispatch by reproduction name; returns (header, rows)."""
    if name == "coinflip":
        return ("k", "llr_cost", "mi_cost"), coinflip_rows(k, kappa, lam)
    if name == "perception":
        return ("state", "p_R_llr", "p_R_mi"), perception_rows(r, kappa, lam)
    if name == "gdp":
        return ("hypothesis", "partition_coefficient"), gdp_rows(kappa)
    if name == "swans":
        return ("epsilon", "cost_I", "cost_II", "ratio"), swans_rows(
            kappa, epsilon
        )
    raise UnknownReproduction(f"no reproduction named {name!r}")
