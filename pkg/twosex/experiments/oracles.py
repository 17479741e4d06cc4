"""
Independent reference computations used to judge the numerical and Monte
Carlo machinery: exact laws of Z_n on truncated supports, the classical
Galton-Watson fixed point, and dense-matrix power iteration.
"""

from __future__ import annotations
from collections import defaultdict
from dataclasses import dataclass
from functools import reduce
from typing import Callable
import numpy as np
from scipy import optimize, signal, stats
from ..decorators import cache
from ..model.core import COUNT_DTYPE, ValidatedModel
from ..simulation.laws import (
    DeterministicRow,
    EmpiricalRow,
    GeometricRow,
    OffspringRow,
    PoissonRow,
    TotalThenThinRow,
)
from .exceptions import OracleUnsupported

DENSE_LIMIT = 2_000_000


def _outer(factors: list[np.ndarray]) -> np.ndarray:
    return reduce(np.multiply.outer, factors)


def _truncate(pmf: np.ndarray, limit: int) -> np.ndarray:
    return pmf[tuple(slice(0, limit + 1) for _ in range(pmf.ndim))]


def _convolve(a: np.ndarray, b: np.ndarray, limit: int) -> np.ndarray:
    return _truncate(signal.convolve(a, b, method="direct"), limit)


def _point_mass(point, limit: int) -> np.ndarray:
    pmf = np.zeros((limit + 1,) * len(point))
    if all(int(v) <= limit for v in point):
        pmf[tuple(int(v) for v in point)] = 1.0
    return pmf


def _single_copy(row: OffspringRow, limit: int) -> np.ndarray:
    grid = np.arange(limit + 1)
    if isinstance(row, EmpiricalRow):
        pmf = np.zeros((limit + 1,) * row.q)
        for point, weight in zip(row.support, row.weights):
            if np.all(point <= limit):
                pmf[tuple(int(v) for v in point)] += weight
        return pmf
    if isinstance(row, TotalThenThinRow):
        blocks = []
        a, b = np.meshgrid(grid, grid, indexing="ij")
        total = a + b
        for mean in row.totals:
            total_pmf = stats.geom.pmf(total + 1, 1.0 / (1.0 + mean))
            blocks.append(total_pmf * stats.binom.pmf(a, total, row.alpha))
        joint = _outer(blocks)
        # axes come out as (X_1, Y_1, X_2, Y_2, ...)
        order = list(range(0, 2 * row.k, 2)) + list(range(1, 2 * row.k, 2))
        return np.transpose(joint, order)
    raise OracleUnsupported(f"No exact law for {row.kind} rows")


def row_sum_law(row: OffspringRow, copies: int, limit: int) -> np.ndarray:
    """Dense pmf of the sum of `copies` independent draws of `row` on {0..limit}^q."""
    if (limit + 1) ** row.q > DENSE_LIMIT:
        raise OracleUnsupported(f"A dense law on {{0..{limit}}}^{row.q} is too large")
    grid = np.arange(limit + 1)
    if copies == 0:
        return _point_mass(np.zeros(row.q), limit)
    if isinstance(row, PoissonRow):
        return _outer([stats.poisson.pmf(grid, copies * rate) for rate in row.rates])
    if isinstance(row, GeometricRow):
        return _outer(
            [stats.nbinom.pmf(grid, copies, p) if m > 0 else (grid == 0).astype(float) for m, p in zip(row.means, row.success)]
        )
    if isinstance(row, DeterministicRow):
        return _point_mass(copies * row.vector.astype(np.int64), limit)
    if isinstance(row, TotalThenThinRow) and row.total_law == "poisson":
        means = np.concatenate([row.alpha * row.totals, (1 - row.alpha) * row.totals])
        return _outer([stats.poisson.pmf(grid, copies * mean) for mean in means])

    single = _single_copy(row, limit)
    result, power, remaining = None, single, copies
    while remaining:
        if remaining & 1:
            result = power if result is None else _convolve(result, power, limit)
        remaining >>= 1
        if remaining:
            power = _convolve(power, power, limit)
    return result


@dataclass(frozen=True)
class ExactLaw:
    """Law of a count vector on a truncated support; `lost` is the mass cut away."""

    states: np.ndarray
    probabilities: np.ndarray
    lost: float

    def probability(self, event: Callable[[np.ndarray], np.ndarray]) -> float:
        return float(self.probabilities[event(self.states)].sum())

    def probability_at_least(self, target) -> float:
        target = np.asarray(target)
        return self.probability(lambda states: np.all(states >= target, axis=1))

    def mean(self) -> np.ndarray:
        return self.probabilities @ self.states.astype(float)


@cache(max_size=4096)
def transition_law(model: ValidatedModel, state: tuple, limit: int) -> ExactLaw:
    """Exact law of Z_1 given Z_0 = state, with W truncated to {0..limit}^q."""
    w_law = None
    for row, couples in zip(model.offspring.rows, state):
        part = row_sum_law(row, int(couples), limit)
        w_law = part if w_law is None else _convolve(w_law, part, limit)
    support = np.argwhere(w_law > 0)
    weights = w_law[tuple(support.T)]
    images = model.mating.apply(support.astype(COUNT_DTYPE))
    states, inverse = np.unique(images, axis=0, return_inverse=True)
    probabilities = np.bincount(inverse.reshape(-1), weights=weights, minlength=len(states))
    return ExactLaw(states, probabilities, max(0.0, 1.0 - float(weights.sum())))


def exact_law(model: ValidatedModel, z0, n: int, limit: int = 100, prune: float = 1e-15) -> ExactLaw:
    """Exact law of Z_n from Z_0 = z0 on a truncated support.

    Offspring totals beyond `limit` per individual type, and states whose
    probability drops below `prune`, are cut; their mass is reported in
    `lost`.

    Raises:
        OracleUnsupported: callback rows or too many individual types.
    """
    current = {tuple(int(v) for v in z0): 1.0}
    lost = 0.0
    for _ in range(n):
        following = defaultdict(float)
        for state, mass in current.items():
            if not any(state):
                following[state] += mass
                continue
            law = transition_law(model, state, limit)
            lost += mass * law.lost
            for image, probability in zip(law.states, law.probabilities):
                following[tuple(int(v) for v in image)] += mass * probability
        current = {}
        for state, mass in following.items():
            if mass < prune:
                lost += mass
            else:
                current[state] = mass
    states = np.array(list(current), dtype=np.int64).reshape(len(current), model.p)
    return ExactLaw(states, np.array(list(current.values())), lost)


def gw_extinction_probability(pgf: Callable[[float], float], mean: float, xtol: float = 1e-12) -> float:
    """Smallest root of pgf(s) = s in [0, 1] for a single-type Galton-Watson process."""
    if mean <= 1:
        return 1.0
    if pgf(0.0) == 0.0:
        return 0.0
    return float(optimize.bisect(lambda s: pgf(s) - s, 0.0, 1.0 - 1e-9, xtol=xtol))


def poisson_extinction_probability(mu: float) -> float:
    return gw_extinction_probability(lambda s: np.exp(mu * (s - 1.0)), mu)


def perron_pair(matrix, tol: float = 1e-13, max_iter: int = 1_000_000) -> tuple[float, np.ndarray, np.ndarray]:
    """(lambda, z, u) of a primitive nonnegative matrix by dense power iteration.

    z is the left eigenvector with |z|_1 = 1 (so zA = lambda z) and u the
    right eigenvector scaled so that <u, z> = 1.
    """
    a = np.asarray(matrix, dtype=float)

    def iterate(operator):
        v = np.full(a.shape[0], 1.0 / a.shape[0])
        for _ in range(max_iter):
            image = operator(v)
            growth = image.sum()
            nxt = image / growth
            if np.abs(nxt - v).sum() < tol:
                return growth, nxt
            v = nxt
        raise RuntimeError("Dense power iteration did not converge")

    lam, left = iterate(lambda v: v @ a)
    _, right = iterate(lambda v: a @ v)
    return float(lam), left, right / (right @ left)


def matrix_primitivity_index(matrix, n_max: int = 50) -> int | None:
    """Smallest n0 with A^n > 0 for every n in [n0, n_max], or None."""
    support = np.asarray(matrix) > 0
    power = support.copy()
    positive = [False]
    for _ in range(n_max):
        positive.append(bool(power.all()))
        power = (power.astype(int) @ support.astype(int)) > 0
    if not positive[n_max]:
        return None
    n0 = n_max
    while n0 > 1 and positive[n0 - 1]:
        n0 -= 1
    return n0


def fidelity_mean(mu_f: float, mu_m: float, m: int, tail: float = 1e-14) -> float:
    """E(min(X, Y))/m for independent X ~ Poisson(m mu_f), Y ~ Poisson(m mu_m)."""
    top = int(stats.poisson.isf(tail, m * max(mu_f, mu_m))) + 1
    k = np.arange(top + 1)
    # E(min) = sum_{k>=1} P(X >= k) P(Y >= k)
    return float(np.sum(stats.poisson.sf(k[1:] - 1, m * mu_f) * stats.poisson.sf(k[1:] - 1, m * mu_m)) / m)
