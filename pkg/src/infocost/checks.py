"""Randomized property suites behind the `check` command.

Every property draws its instances from the package's own seedable PRNG so
a (suite, seed, trials) triple names one exact sequence of checks.  Results
carry the worst observed deviation against the property's bound; the
command line turns any failure into a nonzero exit.

`run_suite` accepts an optional `beta_hook` applied to the dense
coefficient matrix inside the monotonicity property.  It exists as a
fault-injection seam: corrupting the coefficients (say, a negative entry)
must surface as a reported violation, which is how the reporting pipeline
itself gets tested.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .cumulants import (
    FiniteDistribution,
    convolve,
    cumulants,
    cumulants_to_moments,
    finite_distribution,
    finite_distribution_from_llr,
    moments,
    moments_to_cumulants,
    multi_indices,
)
from .costs import (
    BetaMatrix,
    constant_betas,
    kl_matrix,
    llr_cost,
    llr_cost_via_posteriors,
)
from .errors import ValidationError
from .experiments import (
    Experiment,
    GarblingMatrix,
    StateSpace,
    blackwell_dominates,
    dilute,
    garble,
    llr_distribution,
    product,
)
from .rng import Xoshiro256


@dataclass(frozen=True)
class PropertyResult:
    name: str
    trials: int
    max_deviation: float
    bound: float

    @property
    def passed(self) -> bool:
        return self.max_deviation <= self.bound


def _rand_states(rng: Xoshiro256, n: int) -> StateSpace:
    return StateSpace(tuple(f"s{i}" for i in range(n)))


def _rand_experiment(
    rng: Xoshiro256, states: StateSpace, max_signals: int = 5
) -> Experiment:
    m = rng.randint(2, max_signals)
    raw = np.array(
        [[rng.uniform_in(0.05, 1.0) for _ in range(m)] for _ in range(states.n)]
    )
    raw /= raw.sum(axis=1, keepdims=True)
    return Experiment(states, tuple(range(m)), raw)


def _rand_beta(rng: Xoshiro256, states: StateSpace) -> BetaMatrix:
    n = states.n
    coef = np.array(
        [[rng.uniform_in(0.05, 2.0) for _ in range(n)] for _ in range(n)]
    )
    np.fill_diagonal(coef, 0.0)
    return BetaMatrix(states, coef)


def _rand_garbling(rng: Xoshiro256, m_in: int, m_out: int) -> GarblingMatrix:
    raw = np.array(
        [[rng.uniform_in(0.01, 1.0) for _ in range(m_out)] for _ in range(m_in)]
    )
    raw /= raw.sum(axis=1, keepdims=True)
    return GarblingMatrix(raw)


def _rand_prior(rng: Xoshiro256, n: int) -> np.ndarray:
    raw = np.array([rng.uniform_in(0.1, 1.0) for _ in range(n)])
    return raw / raw.sum()


def _product_additivity(rng: Xoshiro256, trials: int, hook) -> PropertyResult:
    worst = 0.0
    for _ in range(trials):
        states = _rand_states(rng, rng.randint(2, 4))
        mu = _rand_experiment(rng, states)
        nu = _rand_experiment(rng, states)
        beta = _rand_beta(rng, states)
        lhs = llr_cost(product(mu, nu), beta)
        rhs = llr_cost(mu, beta) + llr_cost(nu, beta)
        worst = max(worst, abs(lhs - rhs) / (1.0 + abs(rhs)))
    return PropertyResult("product_additivity", trials, worst, 1e-10)


def _dilution_linearity(rng: Xoshiro256, trials: int, hook) -> PropertyResult:
    worst = 0.0
    for _ in range(trials):
        states = _rand_states(rng, rng.randint(2, 4))
        mu = _rand_experiment(rng, states)
        beta = _rand_beta(rng, states)
        alpha = rng.uniform_in(0.05, 0.999)
        lhs = llr_cost(dilute(mu, alpha), beta)
        rhs = alpha * llr_cost(mu, beta)
        worst = max(worst, abs(lhs - rhs) / (1.0 + abs(rhs)))
    return PropertyResult("dilution_linearity", trials, worst, 1e-10)


def _blackwell_monotonicity(rng: Xoshiro256, trials: int, hook) -> PropertyResult:
    worst = 0.0
    for _ in range(trials):
        states = _rand_states(rng, rng.randint(2, 4))
        mu = _rand_experiment(rng, states)
        beta = _rand_beta(rng, states)
        coef = beta.dense()
        if hook is not None:
            coef = hook(np.array(coef, copy=True))
        g = _rand_garbling(rng, mu.n_signals, rng.randint(2, mu.n_signals + 1))
        base = float(np.sum(coef * kl_matrix(mu)))
        garbled = float(np.sum(coef * kl_matrix(garble(mu, g))))
        worst = max(worst, (garbled - base) / (1.0 + abs(base)))
    return PropertyResult("blackwell_monotonicity", trials, worst, 1e-9)


def _column_split_invariance(rng: Xoshiro256, trials: int, hook) -> PropertyResult:
    # splitting one signal into two with state-independent proportions is a
    # garbling with a garbled inverse, so the cost must be unchanged
    worst = 0.0
    for _ in range(trials):
        states = _rand_states(rng, rng.randint(2, 4))
        mu = _rand_experiment(rng, states)
        beta = _rand_beta(rng, states)
        j = rng.randint(0, mu.n_signals - 1)
        t = rng.uniform_in(0.05, 0.95)
        split = np.zeros((mu.n_signals, mu.n_signals + 1))
        for s in range(mu.n_signals):
            if s == j:
                split[s, j] = t
                split[s, mu.n_signals] = 1.0 - t
            else:
                split[s, s] = 1.0
        nu = garble(mu, GarblingMatrix(split))
        dev = abs(llr_cost(nu, beta) - llr_cost(mu, beta))
        worst = max(worst, dev)
    return PropertyResult("column_split_invariance", trials, worst, 1e-10)


def _posterior_representation(rng: Xoshiro256, trials: int, hook) -> PropertyResult:
    worst = 0.0
    for _ in range(trials):
        states = _rand_states(rng, rng.randint(2, 4))
        mu = _rand_experiment(rng, states)
        beta = _rand_beta(rng, states)
        prior = _rand_prior(rng, states.n)
        direct = llr_cost(mu, beta)
        bayes = llr_cost_via_posteriors(mu, beta, prior)
        worst = max(worst, abs(direct - bayes) / (1.0 + abs(direct)))
    return PropertyResult("posterior_representation", trials, worst, 1e-9)


def _garbling_dominance(rng: Xoshiro256, trials: int, hook) -> PropertyResult:
    # garbling can never increase informativeness, so dominance must hold;
    # capped because each trial solves a small feasibility program
    trials = min(trials, 60)
    worst = 0.0
    for _ in range(trials):
        states = _rand_states(rng, rng.randint(2, 3))
        mu = _rand_experiment(rng, states, max_signals=4)
        g = _rand_garbling(rng, mu.n_signals, rng.randint(2, mu.n_signals))
        nu = garble(mu, g)
        if not blackwell_dominates(mu, nu):
            worst = 1.0
    return PropertyResult("garbling_dominance", trials, worst, 0.5)


def _rand_distribution(rng: Xoshiro256, dim: int) -> FiniteDistribution:
    k = rng.randint(2, 4)
    pts = np.array(
        [[rng.uniform_in(-1.0, 1.0) for _ in range(dim)] for _ in range(k)]
    )
    w = np.array([rng.uniform_in(0.1, 1.0) for _ in range(k)])
    return finite_distribution(pts, w / w.sum())


def _cumulant_additivity(rng: Xoshiro256, trials: int, hook) -> PropertyResult:
    worst = 0.0
    for _ in range(trials):
        dim = rng.randint(1, 2)
        a = _rand_distribution(rng, dim)
        b = _rand_distribution(rng, dim)
        ka = cumulants(a, 3)
        kb = cumulants(b, 3)
        kc = cumulants(convolve(a, b), 3)
        for alpha in multi_indices(dim, 3):
            dev = abs(kc[alpha] - ka[alpha] - kb[alpha])
            worst = max(worst, dev / (1.0 + abs(ka[alpha] + kb[alpha])))
    return PropertyResult("cumulant_additivity", trials, worst, 1e-9)


def _moment_round_trip(rng: Xoshiro256, trials: int, hook) -> PropertyResult:
    worst = 0.0
    for _ in range(trials):
        dim = rng.randint(1, 2)
        d = _rand_distribution(rng, dim)
        m = moments(d, 3)
        back = cumulants_to_moments(moments_to_cumulants(m))
        for alpha in multi_indices(dim, 3):
            worst = max(worst, abs(back[alpha] - m[alpha]))
    return PropertyResult("moment_cumulant_round_trip", trials, worst, 1e-10)


def _self_convolution_scaling(rng: Xoshiro256, trials: int, hook) -> PropertyResult:
    worst = 0.0
    for _ in range(trials):
        d = _rand_distribution(rng, 1)
        k = rng.randint(2, 4)
        acc = d
        for _ in range(k - 1):
            acc = convolve(acc, d)
        k1 = cumulants(d, 3)
        kk = cumulants(acc, 3)
        for alpha in multi_indices(1, 3):
            dev = abs(kk[alpha] - k * k1[alpha])
            worst = max(worst, dev / (1.0 + abs(k * k1[alpha])))
    return PropertyResult("self_convolution_scaling", trials, worst, 1e-9)


def _llr_moment_consistency(rng: Xoshiro256, trials: int, hook) -> PropertyResult:
    # moments of the log-likelihood-ratio vector under state i, computed
    # from the merged distribution, must match direct signal-space sums
    worst = 0.0
    for _ in range(trials):
        states = _rand_states(rng, rng.randint(2, 4))
        mu = _rand_experiment(rng, states)
        dist = llr_distribution(mu)
        xi = np.log(mu.probs[1:] / mu.probs[0]).T  # (signal, dim)
        dim = states.n - 1
        for i in range(states.n):
            fd = finite_distribution_from_llr(dist, i)
            mom = moments(fd, 2)
            for alpha in multi_indices(dim, 2):
                direct = float(
                    np.dot(mu.probs[i], np.prod(xi ** np.array(alpha), axis=1))
                )
                worst = max(worst, abs(mom[alpha] - direct))
    return PropertyResult("llr_moment_consistency", trials, worst, 1e-9)


_AXIOMS = (
    _product_additivity,
    _dilution_linearity,
    _blackwell_monotonicity,
    _column_split_invariance,
    _posterior_representation,
    _garbling_dominance,
)
_APPENDIX = (
    _cumulant_additivity,
    _moment_round_trip,
    _self_convolution_scaling,
    _llr_moment_consistency,
)


def run_suite(
    suite: str,
    seed: int = 0,
    trials: int = 200,
    beta_hook: Callable[[np.ndarray], np.ndarray] | None = None,
) -> list[PropertyResult]:
    """Run the named property suite deterministically.

    suite is one of "axioms", "appendix", "all".  The same (suite, seed,
    trials) always produces the same instances and deviations.
    """
    if suite == "axioms":
        props = _AXIOMS
    elif suite == "appendix":
        props = _APPENDIX
    elif suite == "all":
        props = _AXIOMS + _APPENDIX
    else:
        raise ValidationError(f"suite {suite!r} not one of axioms, appendix, all")
    if trials < 1:
        raise ValidationError(f"trials = {trials!r}")
    rng = Xoshiro256(seed)
    return [prop(rng, trials, beta_hook) for prop in props]
