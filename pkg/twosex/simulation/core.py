"""
Forward simulation of Z_n (couples) and W_n (individuals).

    W_{n+1} = sum over couple types i of Z_{n,i} independent copies of V_i
    Z_{n+1} = xi(W_{n+1})

Randomness comes from counter-based streams (see `streams`), so a trial
is a pure function of (model, z0, horizon, seed, trial index).
"""

from __future__ import annotations
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from os import cpu_count
import numpy as np
import pandas as pd
from scipy.stats import norm
from ..log import logger
from ..model.core import (
    COUNT_DTYPE,
    ValidatedModel,
    add_counts,
    population_vector,
    sum_counts,
)
from .exceptions import SamplingThresholdExceeded
from .streams import SLOT_SUPERPOSE, TrialStreams

COUPLE_THRESHOLD = 1_000_000
ESCAPE_CAP = 100_000
PILOT_DRAWS = 10_000


def _normal_superpose(row, couples: int, rng: np.random.Generator) -> np.ndarray:
    pilot_rng, draw_rng = rng.spawn(2)
    pilot = row.sample(PILOT_DRAWS, pilot_rng).astype(float)
    mean = couples * pilot.mean(axis=0)
    spread = np.sqrt(couples * pilot.var(axis=0, ddof=1))
    return np.maximum(np.rint(draw_rng.normal(mean, spread)), 0).astype(COUNT_DTYPE)


def step(
    model: ValidatedModel,
    z,
    rng: TrialStreams | int,
    generation: int = 0,
    couple_threshold: int = COUPLE_THRESHOLD,
    normal_approximation: bool = False,
) -> tuple[np.ndarray, np.ndarray]:
    """One generation: returns (W, xi(W)) from the couple vector z.

    Couples are drawn one by one up to `couple_threshold` per type. Beyond
    it, rows with an exact superposition law sample the sum directly;
    other rows need `normal_approximation`.

    Raises:
        SamplingThresholdExceeded: see above.
        PopulationOverflow: a count left the uint64 range.
    """
    streams = rng if isinstance(rng, TrialStreams) else TrialStreams(rng)
    couples = population_vector(z, model.p)
    w = np.zeros(model.q, dtype=COUNT_DTYPE)

    for i, row in enumerate(model.offspring.rows):
        count = int(couples[i])
        if count == 0:
            continue
        if count <= couple_threshold:
            total = sum_counts(row.sample(count, streams.offspring(generation, i)))
        elif row.exact_superposition:
            total = row.superpose(count, streams.offspring(generation, i, SLOT_SUPERPOSE))
        elif normal_approximation:
            total = _normal_superpose(row, count, streams.offspring(generation, i, SLOT_SUPERPOSE))
        else:
            raise SamplingThresholdExceeded(i, count, couple_threshold)
        w = add_counts(w, total)

    return w, model.mating.apply(w)


@dataclass(frozen=True)
class Trajectory:
    """Z_0..Z_N and W_1..W_N of one trial."""

    z_path: tuple[np.ndarray, ...]
    w_path: tuple[np.ndarray, ...]
    absorbed_at: int | None
    seed: int
    trial: int = 0
    escaped_at: int | None = None
    q: int = 0

    @property
    def final(self) -> np.ndarray:
        return self.z_path[-1]

    @property
    def generations(self) -> int:
        return len(self.z_path) - 1

    @property
    def extinct(self) -> bool:
        return self.absorbed_at is not None

    def to_frame(self) -> pd.DataFrame:
        """One row per generation: n, Z entries, W entries (empty at n=0)."""
        columns = {"n": np.arange(len(self.z_path))}
        for i in range(self.z_path[0].size):
            columns[f"Z{i + 1}"] = pd.array([int(z[i]) for z in self.z_path], dtype="UInt64")
        for j in range(self.q):
            columns[f"W{j + 1}"] = pd.array([None] + [int(w[j]) for w in self.w_path], dtype="UInt64")
        return pd.DataFrame(columns)

    def to_csv(self, path) -> None:
        self.to_frame().to_csv(path, index=False, lineterminator="\n")


def simulate(
    model: ValidatedModel,
    z0,
    horizon: int,
    seed: int,
    trial: int = 0,
    couple_threshold: int = COUPLE_THRESHOLD,
    normal_approximation: bool = False,
    escape_cap: float | None = None,
) -> Trajectory:
    """Runs one trial until `horizon`, absorption at 0, or |Z_n| > escape_cap."""
    if horizon < 0:
        raise ValueError("horizon must be nonnegative")
    streams = TrialStreams(seed, trial)
    z = population_vector(z0, model.p)
    z_path, w_path = [z], []
    absorbed_at = 0 if not np.any(z) else None
    escaped_at = None

    n = 0
    while absorbed_at is None and escaped_at is None and n < horizon:
        w, z = step(model, z, streams, n, couple_threshold, normal_approximation)
        n += 1
        z_path.append(z)
        w_path.append(w)
        if not np.any(z):
            absorbed_at = n
        elif escape_cap is not None and z.sum(dtype=float) > escape_cap:
            escaped_at = n

    return Trajectory(tuple(z_path), tuple(w_path), absorbed_at, streams.seed, trial, escaped_at, model.q)


def run_trials(
    model: ValidatedModel,
    z0,
    horizon: int,
    trials: int,
    seed: int,
    threads: int | None = None,
    first_trial: int = 0,
    **options,
) -> list[Trajectory]:
    """Independent trials first_trial.. in a thread pool; results in trial order."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    indices = range(first_trial, first_trial + trials)
    workers = max(1, min(threads or cpu_count() or 1, trials))
    if workers == 1:
        return [simulate(model, z0, horizon, seed, trial, **options) for trial in indices]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda trial: simulate(model, z0, horizon, seed, trial, **options), indices))


def wilson_interval(successes: int, trials: int, confidence: float = 0.95) -> tuple[float, float]:
    z = norm.ppf(0.5 + confidence / 2)
    share = successes / trials
    denominator = 1 + z**2 / trials
    centre = (share + z**2 / (2 * trials)) / denominator
    half = z / denominator * np.sqrt(share * (1 - share) / trials + z**2 / (4 * trials**2))
    low = 0.0 if successes == 0 else float(max(0.0, centre - half))
    high = 1.0 if successes == trials else float(min(1.0, centre + half))
    return low, high


@dataclass(frozen=True)
class ExtinctionSummary:
    q_hat: float
    ci95: tuple[float, float]
    extinct_count: int
    trials: int
    escaped: int
    horizon: int
    survivor_quantiles: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "q_hat": self.q_hat,
            "ci95": list(self.ci95),
            "extinct_count": self.extinct_count,
            "trials": self.trials,
            "escaped": self.escaped,
            "horizon": self.horizon,
            "survivor_quantiles": self.survivor_quantiles,
        }


SURVIVOR_QUANTILES = (0.05, 0.25, 0.5, 0.75, 0.95)


def batch_extinction(
    model: ValidatedModel,
    z0,
    horizon: int,
    trials: int,
    seed: int,
    threads: int | None = None,
    couple_threshold: int = COUPLE_THRESHOLD,
    normal_approximation: bool = False,
    escape_cap: float | None = ESCAPE_CAP,
) -> ExtinctionSummary:
    """Fraction of trials absorbed by `horizon`, with a Wilson 95% interval.

    Trials whose population exceeds `escape_cap` stop early and count as
    survivors (reported in `escaped`). Survivor quantiles are of |Z| at
    the last recorded generation.
    """
    runs = run_trials(
        model,
        z0,
        horizon,
        trials,
        seed,
        threads,
        couple_threshold=couple_threshold,
        normal_approximation=normal_approximation,
        escape_cap=escape_cap,
    )
    extinct = sum(run.extinct for run in runs)
    escaped = sum(run.escaped_at is not None for run in runs)
    masses = np.array([run.final.sum(dtype=float) for run in runs if not run.extinct])
    quantiles = (
        {f"q{int(level * 100):02d}": float(np.quantile(masses, level)) for level in SURVIVOR_QUANTILES}
        if masses.size
        else {}
    )
    summary = ExtinctionSummary(
        q_hat=extinct / trials,
        ci95=wilson_interval(extinct, trials),
        extinct_count=extinct,
        trials=trials,
        escaped=escaped,
        horizon=horizon,
        survivor_quantiles=quantiles,
    )
    logger.info("Extinction batch finished", q_hat=summary.q_hat, trials=trials, escaped=escaped)
    return summary
