"""Sufficient criteria for transitivity: |Z_n| tends to 0 or to infinity."""

from __future__ import annotations
from dataclasses import dataclass, field
import numpy as np
from ..log import logger
from ..model.core import COUNT_DTYPE, ValidatedModel
from .core import step
from .streams import TrialStreams, stream


@dataclass(frozen=True)
class TransitivityReport:
    """Outcome of the three sufficient criteria; None marks "not applicable"."""

    no_offspring: bool
    no_males: bool | None
    pair_step: bool
    details: dict = field(default_factory=dict)

    @property
    def transitive(self) -> bool:
        return bool(self.no_offspring or self.no_males or self.pair_step)

    def describe(self) -> dict:
        return {
            "no_offspring": self.no_offspring,
            "no_males": self.no_males,
            "pair_step": self.pair_step,
            "transitive": self.transitive,
            "details": self.details,
        }


def _zero_probability(row, columns, trials: int, seed: int, key: int) -> float:
    exact = row.zero_probability(columns)
    if exact is not None:
        return exact
    draws = row.sample(trials, stream(seed, key, 0, 0, 0))
    return float(np.mean(np.all(draws[:, list(columns)] == 0, axis=1)))


def _positivity_index(graph: np.ndarray) -> int | None:
    """Smallest n0 with every row of graph^m positive for all m >= n0, or None.

    A boolean matrix whose powers become positive does so within
    (p - 1)^2 + 1 steps, and stays positive afterwards.
    """
    p = graph.shape[0]
    adjacency = graph.astype(np.int64)
    reach = adjacency.copy()
    first = [None] * p
    for n in range(1, (p - 1) ** 2 + 2):
        for i in np.flatnonzero(reach.all(axis=1)):
            if first[i] is None:
                first[i] = n
        reach = np.minimum(reach @ adjacency, 1)
    if any(value is None for value in first):
        return None
    return max(first)


def check_transitivity(model: ValidatedModel, trials: int = 10_000, seed: int = 0) -> TransitivityReport:
    """Evaluates the sufficient criteria for transitivity.

    1. P(W_1 = 0 | Z_0 = e_i) > 0 for every i.
    2. Bisexual layout: P(no male offspring | Z_0 = e_i) > 0 for every i,
       and xi(x, 0) = 0 for every female vector x.
    3. Some type l has P(|Z_1| = 2 | Z_0 = e_l) > 0, and the process is
       strongly primitive: E(Z_m | Z_0 = e_i) > 0 for every i and m >= n0.

    Zero probabilities are exact for parametric rows and estimated from
    `trials` draws for callback rows. Criterion 3 simulates `trials` single
    couples of each type and reads strong primitivity off the graph with an
    edge j -> k when some Z_1 from e_j had Z_{1,k} >= 1. Superadditivity
    makes every path of that graph realisable.
    """
    rows = model.offspring.rows
    details = {}

    everything = range(model.q)
    empty = [_zero_probability(row, everything, trials, seed, i) for i, row in enumerate(rows)]
    details["p_no_offspring"] = empty
    no_offspring = all(value > 0 for value in empty)

    no_males = None
    if model.split is not None:
        n_f, _ = model.split
        males = range(n_f, model.q)
        barren = [_zero_probability(row, males, trials, seed, model.p + i) for i, row in enumerate(rows)]
        rng = stream(seed, 2 * model.p + 1)
        females = rng.integers(0, 50, size=(256, n_f), endpoint=True).astype(COUNT_DTYPE)
        without_males = np.hstack([females, np.zeros((256, model.q - n_f), dtype=COUNT_DTYPE)])
        unmated = bool(np.all(model.mating.apply(without_males) == 0))
        details["p_no_males"] = barren
        details["xi_without_males_is_zero"] = unmated
        no_males = unmated and all(value > 0 for value in barren)

    graph = np.zeros((model.p, model.p), dtype=bool)
    pair_types = []
    for l in range(model.p):
        start = np.zeros(model.p, dtype=COUNT_DTYPE)
        start[l] = 1
        paired = False
        for trial in range(trials):
            _, z = step(model, start, TrialStreams(seed, trial), generation=l)
            graph[l] |= z > 0
            paired = paired or int(z.sum()) == 2
            if paired and graph[l].all():
                break
        if paired:
            pair_types.append(l)
    n0 = _positivity_index(graph)
    details["pair_step_types"] = pair_types
    details["one_step_graph"] = graph.astype(int).tolist()
    details["n0"] = n0
    details["strongly_primitive"] = n0 is not None
    pair_step = bool(pair_types) and n0 is not None

    report = TransitivityReport(no_offspring, no_males, pair_step, details)
    logger.debug("Transitivity criteria evaluated", **report.describe())
    return report
