"""Moments and cumulants of finite-support distributions on R^n.

Implements the bounded multi-index set A = {0..N}^n minus zero, the moment
and cumulant vectors indexed by A, the conversion formulas in both
directions, and convolution of distributions.  Cumulants add under
convolution; that additivity is the property the rest of the library leans
on when it reasons about independent repetitions.

Conversions run through truncated power-series log and exp of the
exponential moment generating function.  Expanding those series term by
term reproduces, with identical coefficients, the alternating sum over
ordered collections of multi-indices that `enumerate_lambda` spells out;
grouping by power keeps the work polynomial in the box size instead of in
the (much larger) number of collections.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping, Sequence

import numpy as np
from scipy.signal import convolve as _nd_convolve

from .errors import (
    DimensionMismatch,
    DimensionTooLarge,
    IncompleteInput,
    ValidationError,
)
from .experiments import LLRDistribution, _merge_point_rows

MultiIndex = tuple[int, ...]

MAX_DIM = 4
MAX_ORDER = 4
# refuse literal Lambda enumerations beyond this many ordered collections
ENUM_CAP = 2_000_000


def _check_box(n: int, order: int):
    if not 1 <= n <= MAX_DIM:
        raise DimensionTooLarge(f"dimension {n} outside 1..{MAX_DIM}")
    if not 1 <= order <= MAX_ORDER:
        raise DimensionTooLarge(f"order {order} outside 1..{MAX_ORDER}")


def multi_indices(n: int, order: int) -> list[MultiIndex]:
    """All alpha in {0..order}^n except the zero index, lexicographically."""
    _check_box(n, order)
    out = [a for a in itertools.product(range(order + 1), repeat=n) if any(a)]
    return out


@dataclass(frozen=True, eq=False)
class FiniteDistribution:
    """Probability distribution with finitely many atoms in R^n."""

    atoms: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        atoms = np.atleast_2d(np.asarray(self.atoms, dtype=float))
        weights = np.asarray(self.weights, dtype=float).ravel()
        if atoms.shape[0] != weights.size:
            raise DimensionMismatch(
                f"{atoms.shape[0]} atoms against {weights.size} weights"
            )
        if atoms.size == 0:
            raise ValidationError("empty distribution")
        if not np.all(np.isfinite(atoms)):
            raise ValidationError("non-finite atom")
        if not np.all(np.isfinite(weights)) or np.any(weights < 0):
            raise ValidationError("weights must be finite and non-negative")
        if abs(float(weights.sum()) - 1.0) > 1e-9:
            raise ValidationError(f"weights sum to {float(weights.sum())!r}")
        if len({tuple(row) for row in atoms}) != atoms.shape[0]:
            raise ValidationError("duplicate atoms")
        atoms = atoms.copy()
        weights = weights.copy()
        atoms.flags.writeable = False
        weights.flags.writeable = False
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "weights", weights)

    @property
    def dim(self) -> int:
        return self.atoms.shape[1]

    @property
    def n_atoms(self) -> int:
        return self.atoms.shape[0]


def finite_distribution(points, weights) -> FiniteDistribution:
    """Construct with nearby points (within 1e-12) merged first."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    w = np.asarray(weights, dtype=float).reshape(1, -1)
    merged_pts, merged_w = _merge_point_rows(pts, w, 1e-12)
    return FiniteDistribution(merged_pts, merged_w[0])


def finite_distribution_from_llr(
    dist: LLRDistribution, state: int
) -> FiniteDistribution:
    """State `state`'s distribution over the log-likelihood-ratio vector."""
    if not 0 <= state < dist.n_states:
        raise ValidationError(f"state index {state} out of range")
    return FiniteDistribution(dist.atoms, dist.weights[state])


def convolve(a: FiniteDistribution, b: FiniteDistribution) -> FiniteDistribution:
    """Distribution of X + Y for independent X ~ a, Y ~ b."""
    if a.dim != b.dim:
        raise DimensionMismatch(f"dimensions {a.dim} and {b.dim}")
    sums = (a.atoms[:, None, :] + b.atoms[None, :, :]).reshape(-1, a.dim)
    w = (a.weights[:, None] * b.weights[None, :]).reshape(1, -1)
    pts, ws = _merge_point_rows(sums, w, 1e-12)
    return FiniteDistribution(pts, ws[0])


def _validated_values(dim: int, order: int, values) -> dict:
    _check_box(dim, order)
    vals = dict(values)
    for alpha in multi_indices(dim, order):
        if alpha not in vals:
            raise IncompleteInput(f"missing index {alpha}")
        if not math.isfinite(vals[alpha]):
            raise ValidationError(f"non-finite value at {alpha}")
    return vals


@dataclass(frozen=True)
class MomentVector:
    """Mixed moments m(alpha) for every alpha in the index box."""

    dim: int
    order: int
    values: Mapping[MultiIndex, float]

    def __post_init__(self):
        vals = _validated_values(self.dim, self.order, self.values)
        object.__setattr__(self, "values", vals)

    def __getitem__(self, alpha: MultiIndex) -> float:
        return self.values[tuple(alpha)]


@dataclass(frozen=True)
class CumulantVector:
    """Mixed cumulants kappa(alpha) for every alpha in the index box."""

    dim: int
    order: int
    values: Mapping[MultiIndex, float]

    def __post_init__(self):
        vals = _validated_values(self.dim, self.order, self.values)
        object.__setattr__(self, "values", vals)

    def __getitem__(self, alpha: MultiIndex) -> float:
        return self.values[tuple(alpha)]


def moments(dist: FiniteDistribution, order: int) -> MomentVector:
    """m(alpha) = sum of weight * atom^alpha over the support."""
    _check_box(dist.dim, order)
    # per-dimension power tables, then products across dimensions
    powers = [
        np.vander(dist.atoms[:, d], order + 1, increasing=True)
        for d in range(dist.dim)
    ]
    vals = {}
    for alpha in multi_indices(dist.dim, order):
        prod = np.ones(dist.n_atoms)
        for d, e in enumerate(alpha):
            if e:
                prod = prod * powers[d][:, e]
        vals[alpha] = float(np.dot(dist.weights, prod))
    return MomentVector(dist.dim, order, vals)


def _descending_nonzero(alpha: MultiIndex):
    ranges = [range(a, -1, -1) for a in alpha]
    for v in itertools.product(*ranges):
        if any(v):
            yield v


@lru_cache(maxsize=None)
def _lambda_count(alpha: MultiIndex) -> int:
    if not any(alpha):
        return 1
    total = 0
    for v in _descending_nonzero(alpha):
        total += _lambda_count(tuple(a - b for a, b in zip(alpha, v)))
    return total


def lambda_count(alpha) -> int:
    """Number of ordered collections of non-zero indices summing to alpha."""
    alpha = _check_alpha(alpha)
    return _lambda_count(alpha)


def _check_alpha(alpha) -> MultiIndex:
    alpha = tuple(int(a) for a in alpha)
    if not 1 <= len(alpha) <= MAX_DIM:
        raise DimensionTooLarge(f"dimension {len(alpha)} outside 1..{MAX_DIM}")
    if any(a < 0 for a in alpha):
        raise ValidationError(f"negative component in {alpha}")
    if not any(alpha):
        raise ValidationError("zero multi-index")
    if max(alpha) > MAX_ORDER:
        raise DimensionTooLarge(f"component above {MAX_ORDER} in {alpha}")
    return alpha


@lru_cache(maxsize=None)
def _enumerate(alpha: MultiIndex) -> tuple:
    out = []
    for v in _descending_nonzero(alpha):
        rem = tuple(a - b for a, b in zip(alpha, v))
        if not any(rem):
            out.append((v,))
        else:
            out.extend((v,) + tail for tail in _enumerate(rem))
    return tuple(out)


def enumerate_lambda(alpha) -> tuple:
    """All ordered collections (lambda^1..lambda^q) of non-zero multi-indices
    with componentwise sum alpha, first part descending lexicographically and
    the tail ordered recursively the same way.
    """
    alpha = _check_alpha(alpha)
    count = _lambda_count(alpha)
    if count > ENUM_CAP:
        raise DimensionTooLarge(
            f"{count} ordered collections for {alpha}; cap is {ENUM_CAP}"
        )
    return _enumerate(alpha)


def _factorial_box(n: int, order: int) -> np.ndarray:
    """fact[alpha] = prod of component factorials, as floats (exact here)."""
    f = np.array([math.factorial(e) for e in range(order + 1)], dtype=float)
    out = f
    for _ in range(n - 1):
        out = np.multiply.outer(out, f)
    return out


def _truncated_product(a: np.ndarray, b: np.ndarray, order: int) -> np.ndarray:
    full = _nd_convolve(a, b, method="direct")
    cut = tuple(slice(0, order + 1) for _ in range(a.ndim))
    return full[cut]


def _vector_to_egf(vec, n: int, order: int) -> np.ndarray:
    """Series coefficients value(alpha)/alpha! on the box, zero at the origin."""
    fact = _factorial_box(n, order)
    arr = np.zeros((order + 1,) * n)
    for alpha in multi_indices(n, order):
        arr[alpha] = vec[alpha] / fact[alpha]
    return arr


def _egf_to_vector(arr: np.ndarray, n: int, order: int) -> dict:
    fact = _factorial_box(n, order)
    return {
        alpha: float(arr[alpha] * fact[alpha])
        for alpha in multi_indices(n, order)
    }


def moments_to_cumulants(m: MomentVector) -> CumulantVector:
    """kappa(alpha) from the alternating sum over ordered collections:
    sum over (lambda^1..lambda^q) of (-1)^(q-1)/q * alpha!/(prod lambda!)
    * prod m(lambda^p), evaluated via the truncated series log.
    """
    n, order = m.dim, m.order
    M = _vector_to_egf(m, n, order)
    total = M.copy()
    power = M
    for q in range(2, n * order + 1):
        power = _truncated_product(power, M, order)
        total += ((-1.0) ** (q - 1) / q) * power
    return CumulantVector(n, order, _egf_to_vector(total, n, order))


def cumulants_to_moments(k: CumulantVector) -> MomentVector:
    """m(alpha) = sum over collections of 1/q! * alpha!/(prod lambda!)
    * prod kappa(lambda^p), evaluated via the truncated series exp.
    """
    n, order = k.dim, k.order
    K = _vector_to_egf(k, n, order)
    total = np.zeros_like(K)
    power = K.copy()
    qfact = 1.0
    for q in range(1, n * order + 1):
        total += power / qfact
        power = _truncated_product(power, K, order)
        qfact *= q + 1
    return MomentVector(n, order, _egf_to_vector(total, n, order))


def cumulants(dist: FiniteDistribution, order: int) -> CumulantVector:
    return moments_to_cumulants(moments(dist, order))
