"""
Concave Perron-Frobenius solver for M(z) = lambda* z on the simplex.

solve_eigen certifies that M is finite on the simplex (by sampling), that
M is primitive, then runs u <- M(u)/|M(u)| from several random simplex
points and checks they agree.
"""

from __future__ import annotations
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from os import cpu_count
import numpy as np
from ..decorators import cache, timed
from ..log import logger
from ..model.core import ValidatedModel, one_norm
from ..operator.core import (
    DEFAULT_R_MAX,
    DEFAULT_TOL,
    DIVERGE_CAP,
    eval_M,
    eval_M_batch,
    iterates,
    primitivity_index,
)
from ..operator.exceptions import InfiniteOperator, NotConverged
from ..simulation.streams import stream
from .exceptions import StartDisagreement

CRITICAL_BAND = 1e-6
SIMPLEX_SAMPLES = 100
# stream address reserved for the finiteness check
FINITENESS_KEY = 2**32


class Criticality(Enum):
    SUBCRITICAL = "Subcritical"
    CRITICAL = "Critical"
    SUPERCRITICAL = "Supercritical"
    SURVIVAL_FROM_LARGE_STATES = "SurvivalFromLargeStates"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class EigenResult:
    lambda_star: float
    z_star: np.ndarray
    residual: float
    iterations: int
    n0: int
    spread: float = 0.0
    starts: int = 1

    def describe(self) -> dict:
        return {
            "lambda_star": self.lambda_star,
            "z_star": self.z_star.tolist(),
            "residual": self.residual,
            "iterations": self.iterations,
            "n0": self.n0,
            "spread": self.spread,
            "starts": self.starts,
        }


@cache(max_size=64)
def certify_finite(
    model: ValidatedModel,
    tol: float = DEFAULT_TOL,
    r_max: float = DEFAULT_R_MAX,
    diverge_cap: float = DIVERGE_CAP,
    seed: int = 0,
) -> int:
    """Evaluates M on the basis, the simplex midpoint and random simplex points.

    Returns the number of points checked.

    Raises:
        InfiniteOperator: at the first sampled point with a diverging component.
        NotConverged: some sampled evaluation did not settle.
    """
    rng = stream(seed, FINITENESS_KEY)
    points = np.vstack(
        [
            np.eye(model.p),
            np.full((1, model.p), 1.0 / model.p),
            rng.dirichlet(np.ones(model.p), size=SIMPLEX_SAMPLES),
        ]
    )
    batch = eval_M_batch(model, points, tol, r_max, diverge_cap)
    infinite = np.isinf(batch.values)
    if np.any(infinite):
        k = int(np.flatnonzero(np.any(infinite, axis=1))[0])
        raise InfiniteOperator(points[k], np.flatnonzero(infinite[k]))
    if not np.all(batch.converged):
        raise NotConverged("M did not settle on the simplex sample", float(np.max(batch.gaps)))
    return len(points)


def _power_iteration(model, start, tol, max_iter, r_max, diverge_cap):
    u = start / one_norm(start)
    for k in range(1, max_iter + 1):
        image = eval_M(model, u, tol, r_max, diverge_cap)
        if not image.finite:
            raise InfiniteOperator(u, image.infinite)
        growth = one_norm(image.value)
        nxt = image.value / growth
        step = one_norm(nxt - u)
        if step < tol and growth * step < tol:
            return growth, u, growth * step, k
        u = nxt
    raise NotConverged(f"Normalised iteration did not settle in {max_iter} steps", step, u)


@timed
def solve_eigen(
    model: ValidatedModel,
    tol: float = DEFAULT_TOL,
    max_iter: int = 10_000,
    starts: int = 5,
    seed: int = 0,
    r_max: float = DEFAULT_R_MAX,
    diverge_cap: float = DIVERGE_CAP,
    n_max: int = 50,
    threads: int | None = None,
) -> EigenResult:
    """Unique eigenpair (lambda*, z*) of M with z* in the open simplex.

    Raises:
        InfiniteOperator: M diverges somewhere on the simplex.
        NotPrimitiveWithin: M is not primitive within n_max iterations.
        NotConverged: some start needed more than max_iter steps.
        StartDisagreement: starts ended more than 10*tol apart.
    """
    if starts < 1:
        raise ValueError("starts must be at least 1")
    certify_finite(model, tol, r_max, diverge_cap, seed)
    n0 = primitivity_index(model, n_max, tol, r_max)

    origins = [stream(seed, FINITENESS_KEY + 1, s).dirichlet(np.ones(model.p)) for s in range(starts)]
    workers = max(1, min(threads or cpu_count() or 1, starts))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        runs = list(pool.map(lambda u0: _power_iteration(model, u0, tol, max_iter, r_max, diverge_cap), origins))

    points = np.array([run[1] for run in runs])
    spread = max((one_norm(a - b) for a in points for b in points), default=0.0)
    if spread > 10 * tol:
        raise StartDisagreement(spread, 10 * tol)

    lambda_star, z_star, residual, _ = runs[0]
    result = EigenResult(
        lambda_star=float(lambda_star),
        z_star=z_star,
        residual=float(residual),
        iterations=max(run[3] for run in runs),
        n0=n0,
        spread=float(spread),
        starts=starts,
    )
    logger.debug("Eigenpair found", lambda_star=result.lambda_star, iterations=result.iterations, spread=spread)
    return result


def classify(eigen: EigenResult | InfiniteOperator, critical_band: float = CRITICAL_BAND) -> Criticality:
    """Extinction regime: almost sure extinction from every state iff lambda* <= 1."""
    if isinstance(eigen, InfiniteOperator):
        return Criticality.SURVIVAL_FROM_LARGE_STATES
    if eigen.lambda_star < 1 - critical_band:
        return Criticality.SUBCRITICAL
    if eigen.lambda_star > 1 + critical_band:
        return Criticality.SUPERCRITICAL
    return Criticality.CRITICAL


def growth_rate_via_norms(
    model: ValidatedModel,
    z,
    k_max: int = 10_000,
    tol: float = DEFAULT_TOL,
) -> float:
    """Stabilised ratio |M^{k+1}(z)|/|M^k(z)|.

    Raises:
        NotConverged: the ratio still moves after k_max steps.
    """
    previous_log, previous_ratio, ratio = None, None, None
    for _, _, log_norm in iterates(model, z, k_max + 1, tol):
        if log_norm == -np.inf:
            if previous_log is None:
                raise ValueError("z must be nonzero")
            return 0.0
        if previous_log is not None:
            ratio = float(np.exp(log_norm - previous_log))
            if previous_ratio is not None and abs(ratio - previous_ratio) < tol * max(1.0, ratio):
                return ratio
            previous_ratio = ratio
        previous_log = log_norm
    raise NotConverged(f"Norm ratio still moving after {k_max} steps", abs(ratio - previous_ratio), ratio)


def growth_rate_via_root(model: ValidatedModel, z, k: int = 200, tol: float = DEFAULT_TOL) -> float:
    """|M^k(z)|^{1/k}, computed in log space; converges like O(1/k)."""
    if k < 1:
        raise ValueError("k must be at least 1")
    for _, _, log_norm in iterates(model, z, k, tol):
        pass
    return 0.0 if log_norm == -np.inf else float(np.exp(log_norm / k))
