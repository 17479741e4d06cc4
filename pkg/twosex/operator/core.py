"""
The mean growth operator M(z) = sup_r xi(r zV)/r and its iterates.

g(r) = xi(r zV)/r is nondecreasing along the doubling schedule r = 1, 2, 4, ...
(superadditivity), so the last schedule value is a lower bound that
converges to M(z). Everything here works on batches of points at once:
row k of the input is an independent evaluation.
"""

from __future__ import annotations
from dataclasses import dataclass
from typing import Iterator
import numpy as np
from ..log import logger
from ..model.core import ValidatedModel, one_norm, real_vector
from .exceptions import InfiniteOperator, NotConverged, NotPrimitiveWithin

DEFAULT_TOL = 1e-8
DEFAULT_R_MAX = 2.0**40
DIVERGE_CAP = 1e12
# growth per doubling that still counts as diverging once above the cap
DIVERGE_GROWTH = 0.02
POSITIVITY_FLOOR = 1e-12
STABLE_DOUBLINGS = 2


@dataclass(frozen=True)
class MEvaluation:
    value: np.ndarray
    r_used: float
    converged: bool
    gap: float

    @property
    def infinite(self) -> tuple[int, ...]:
        return tuple(int(c) for c in np.flatnonzero(np.isinf(self.value)))

    @property
    def finite(self) -> bool:
        return not self.infinite


@dataclass(frozen=True)
class PFunctional:
    value: float
    n_used: int
    converged: bool


@dataclass(frozen=True)
class BatchEvaluation:
    values: np.ndarray
    r_used: np.ndarray
    gaps: np.ndarray
    converged: np.ndarray


def scaled_image(model: ValidatedModel, z, r: float, extension: str | None = None) -> np.ndarray:
    """One schedule value g(r) = xi(r zV)/r (batch aware)."""
    points = np.asarray(z, dtype=float)
    return model.mating.apply_real(r * (points @ model.V.values), extension) / r


def _relative_gap(new: np.ndarray, old: np.ndarray) -> np.ndarray:
    scale = np.maximum(np.abs(new), np.finfo(float).tiny)
    gap = np.where(new == old, 0.0, np.abs(new - old) / scale)
    return np.where(np.isinf(new), 0.0, gap)


def eval_M_batch(
    model: ValidatedModel,
    points,
    tol: float = DEFAULT_TOL,
    r_max: float = DEFAULT_R_MAX,
    diverge_cap: float = DIVERGE_CAP,
    extension: str | None = None,
) -> BatchEvaluation:
    """Evaluates M on every row of `points` (shape (m, p)).

    Rows are retired once their relative increment stays below `tol` for
    two consecutive doublings, or once a component is flagged infinite
    (above `diverge_cap` and still growing). Rows still moving at `r_max`
    come back with converged=False.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if r_max < 1:
        raise ValueError("r_max must be at least 1")
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if points.shape[1] != model.p:
        raise ValueError(f"Points must have {model.p} components, got {points.shape[1]}")
    if np.any(points < 0) or not np.all(np.isfinite(points)):
        raise ValueError("M is defined on finite nonnegative vectors only")

    m = points.shape[0]
    values = scaled_image(model, points, 1.0, extension)
    r_used = np.ones(m)
    gaps = np.full(m, np.inf)
    stable = np.zeros(m, dtype=int)
    done = np.zeros(m, dtype=bool)

    r = 1.0
    while not np.all(done) and 2 * r <= r_max:
        r *= 2
        active = np.flatnonzero(~done)
        old = values[active]
        new = scaled_image(model, points[active], r, extension)

        diverging = (new > diverge_cap) & (new >= (1 + DIVERGE_GROWTH) * old)
        new = np.where(diverging | np.isinf(old), np.inf, new)

        gap = _relative_gap(new, old).max(axis=1)
        stable[active] = np.where(gap < tol, stable[active] + 1, 0)
        values[active] = new
        gaps[active] = gap
        r_used[active] = r
        done[active] = (stable[active] >= STABLE_DOUBLINGS) | np.any(np.isinf(new), axis=1)

    return BatchEvaluation(values, r_used, gaps, done)


def eval_M(
    model: ValidatedModel,
    z,
    tol: float = DEFAULT_TOL,
    r_max: float = DEFAULT_R_MAX,
    diverge_cap: float = DIVERGE_CAP,
    extension: str | None = None,
) -> MEvaluation:
    """M(z) for a single nonnegative vector z.

    Raises:
        NotConverged: r_max reached while still below the divergence cap.
    """
    point = real_vector(z, model.p)
    batch = eval_M_batch(model, point[None, :], tol, r_max, diverge_cap, extension)
    result = MEvaluation(batch.values[0], float(batch.r_used[0]), bool(batch.converged[0]), float(batch.gaps[0]))
    if not result.converged:
        raise NotConverged(f"M(z) still moving at r={result.r_used:.3g}", result.gap, result.value)
    return result


def iterates(
    model: ValidatedModel,
    z,
    n: int,
    tol: float = DEFAULT_TOL,
    r_max: float = DEFAULT_R_MAX,
    diverge_cap: float = DIVERGE_CAP,
    extension: str | None = None,
) -> Iterator[tuple[int, np.ndarray, float]]:
    """Yields (k, M^k(z)/|M^k(z)|, log|M^k(z)|) for k = 0..n.

    Homogeneity lets every step work on a unit vector, so deep iterates
    neither overflow nor underflow. A dead iterate yields a zero direction
    and log-norm -inf from then on.

    Raises:
        InfiniteOperator: some intermediate component diverged.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    point = real_vector(z, model.p)
    norm = one_norm(point)
    direction = point / norm if norm > 0 else np.zeros(model.p)
    log_norm = float(np.log(norm)) if norm > 0 else -np.inf
    yield 0, direction, log_norm

    for k in range(1, n + 1):
        if log_norm > -np.inf:
            image = eval_M(model, direction, tol, r_max, diverge_cap, extension)
            if not image.finite:
                raise InfiniteOperator(direction, image.infinite)
            norm = one_norm(image.value)
            if norm > 0:
                direction = image.value / norm
                log_norm += float(np.log(norm))
            else:
                direction, log_norm = np.zeros(model.p), -np.inf
        yield k, direction, log_norm


def iterate_M(
    model: ValidatedModel,
    z,
    n: int,
    tol: float = DEFAULT_TOL,
    r_max: float = DEFAULT_R_MAX,
    diverge_cap: float = DIVERGE_CAP,
    extension: str | None = None,
    normalised: bool = False,
) -> np.ndarray:
    """M^n(z); with `normalised=True` the unit-norm direction of M^n(z).

    Raises:
        InfiniteOperator: some intermediate component diverged.
    """
    if normalised:
        for _, direction, _ in iterates(model, z, n, tol, r_max, diverge_cap, extension):
            pass
        return direction
    if n < 0:
        raise ValueError("n must be nonnegative")
    current = real_vector(z, model.p).copy()
    for _ in range(n):
        image = eval_M(model, current, tol, r_max, diverge_cap, extension)
        if not image.finite:
            raise InfiniteOperator(current, image.infinite)
        current = image.value
    return current


def primitivity_index(
    model: ValidatedModel,
    n_max: int = 50,
    tol: float = DEFAULT_TOL,
    r_max: float = DEFAULT_R_MAX,
    floor: float = POSITIVITY_FLOOR,
) -> int:
    """Smallest n0 with M^n(e_i) > floor componentwise for all i and n0 <= n <= n_max.

    Positivity is judged on normalised iterates, which is scale free by
    homogeneity.

    Raises:
        NotPrimitiveWithin: M^{n_max}(e_i) has a vanishing component for some i.
    """
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    n0 = 1
    for i in range(model.p):
        positive = [
            bool(np.all(direction > floor))
            for _, direction, _ in iterates(model, np.eye(model.p)[i], n_max, tol, r_max)
        ]
        if not positive[n_max]:
            raise NotPrimitiveWithin(n_max, basis=i)
        first = n_max
        while first > 1 and positive[first - 1]:
            first -= 1
        n0 = max(n0, first)
    logger.debug("Primitivity index found", n0=n0, n_max=n_max)
    return n0


def eval_P_batch(
    model: ValidatedModel,
    points,
    lambda_star: float,
    tol: float = DEFAULT_TOL,
    n_max: int = 10_000,
    r_max: float = DEFAULT_R_MAX,
) -> tuple[np.ndarray, np.ndarray]:
    """P(z) = lim |M^n(z)|/lambda*^n for every row of `points`.

    Returns (values, depths). Rows retire after two consecutive steps with
    a relative change below `tol`.

    Raises:
        NotConverged: some row is still moving after n_max steps.
    """
    if lambda_star <= 0:
        raise ValueError("lambda_star must be positive")
    current = np.atleast_2d(np.asarray(points, dtype=float)).copy()
    norms = np.abs(current).sum(axis=1)
    values = norms.copy()
    depths = np.zeros(len(current), dtype=int)
    stable = np.zeros(len(current), dtype=int)
    done = norms == 0
    gap = np.zeros(1)

    for n in range(1, n_max + 1):
        active = np.flatnonzero(~done)
        if active.size == 0:
            break
        batch = eval_M_batch(model, current[active], tol, r_max)
        if np.any(np.isinf(batch.values)):
            k = np.flatnonzero(np.any(np.isinf(batch.values), axis=1))[0]
            raise InfiniteOperator(current[active[k]], np.flatnonzero(np.isinf(batch.values[k])))
        current[active] = batch.values / lambda_star
        new = np.abs(current[active]).sum(axis=1)
        gap = _relative_gap(new[:, None], values[active][:, None])[:, 0]
        stable[active] = np.where(gap < tol, stable[active] + 1, 0)
        values[active] = new
        depths[active] = n
        done[active] = (stable[active] >= STABLE_DOUBLINGS) | (new == 0)

    if not np.all(done):
        raise NotConverged(f"P(z) still moving after {n_max} steps", float(np.max(gap)), values)
    return values, depths


def eval_P(
    model: ValidatedModel,
    z,
    lambda_star: float,
    z_star=None,
    tol: float = DEFAULT_TOL,
    n_max: int = 10_000,
) -> PFunctional:
    """P(z) through v_{n+1} = M(v_n)/lambda*; exact on the ray through z*."""
    point = real_vector(z, model.p)
    if z_star is not None:
        scale = one_norm(point)
        if scale > 0 and one_norm(point / scale - np.asarray(z_star, dtype=float)) < 1e-12:
            return PFunctional(scale, 0, True)
    values, depths = eval_P_batch(model, point[None, :], lambda_star, tol, n_max)
    return PFunctional(float(values[0]), int(depths[0]), True)
