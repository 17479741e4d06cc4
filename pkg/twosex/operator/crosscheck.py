from __future__ import annotations
from concurrent.futures import ThreadPoolExecutor
from os import cpu_count
import numpy as np
import pandas as pd
from ..model.core import ValidatedModel, real_vector
from ..simulation.core import step
from ..simulation.streams import TrialStreams
from .core import DEFAULT_TOL, eval_M

# estimates may exceed M(z) by this many standard errors before being flagged
BOUND_SIGMA = 4.0


def mean_growth_crosscheck(
    model: ValidatedModel,
    z,
    m_grid,
    trials: int,
    seed: int,
    threads: int | None = None,
    tol: float = DEFAULT_TOL,
) -> pd.DataFrame:
    """Monte Carlo E(Z_1 | Z_0 = floor(m z))/m next to M(z), one row per (m, component).

    E(Z_1 | Z_0 = z)/m never exceeds M(z) and increases towards it as m
    grows; `below_bound` flags rows within BOUND_SIGMA standard errors of
    the bound.
    """
    point = real_vector(z, model.p)
    if not np.any(point):
        raise ValueError("z must be nonzero")
    if trials < 1:
        raise ValueError("trials must be at least 1")
    bound = eval_M(model, point, tol).value
    workers = max(1, min(threads or cpu_count() or 1, trials))

    records = []
    for m in m_grid:
        start = np.floor(m * point).astype(np.uint64)

        def one(trial: int) -> np.ndarray:
            return step(model, start, TrialStreams(seed, trial))[1].astype(float)

        with ThreadPoolExecutor(max_workers=workers) as pool:
            draws = np.vstack(list(pool.map(one, range(trials)))) / m
        mean = draws.mean(axis=0)
        stderr = draws.std(axis=0, ddof=1) / np.sqrt(trials) if trials > 1 else np.zeros(model.p)
        for i in range(model.p):
            records.append(
                {
                    "m": int(m),
                    "component": i,
                    "estimate": float(mean[i]),
                    "stderr": float(stderr[i]),
                    "M": float(bound[i]),
                    "below_bound": bool(mean[i] <= bound[i] + BOUND_SIGMA * stderr[i] + tol * max(1.0, bound[i])),
                    "trials": trials,
                }
            )
    return pd.DataFrame.from_records(records)
