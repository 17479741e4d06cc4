"""
Offspring laws: one independent random row V_i per couple type.

Every row draws nonnegative integer vectors of a fixed length q. Rows with
closed forms also expose their mean, the probability that chosen columns
vanish, and an exact law for the sum of n independent copies
(`superpose`), which the simulator uses once a type holds more couples
than it is willing to draw one by one.
"""

from __future__ import annotations
from abc import ABC, abstractmethod
from typing import Callable
import numpy as np
from ..model.core import COUNT_DTYPE, U64_MAX
from ..model.exceptions import DimensionMismatch, PopulationOverflow
from .exceptions import UnknownOffspringKind

# numpy's Poisson sampler rejects larger rates
POISSON_RATE_LIMIT = 1e18


def _vector(values, name: str) -> np.ndarray:
    vector = np.asarray(values, dtype=float)
    if vector.ndim != 1 or vector.size == 0:
        raise DimensionMismatch(f"{name} must be a non-empty vector")
    if np.any(vector < 0) or not np.all(np.isfinite(vector)):
        raise ValueError(f"{name} must be finite and nonnegative")
    vector.setflags(write=False)
    return vector


def _check_total(expected: np.ndarray):
    if np.any(expected >= min(float(U64_MAX), POISSON_RATE_LIMIT)):
        raise PopulationOverflow("Expected offspring count leaves the 64-bit range")


class OffspringRow(ABC):
    kind: str = "abstract"
    exact_superposition: bool = True

    q: int

    @abstractmethod
    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        """n independent draws, shape (n, q), dtype uint64."""

    @abstractmethod
    def closed_form_mean(self) -> np.ndarray | None: ...

    def superpose(self, n: int, rng: np.random.Generator) -> np.ndarray:
        """Sum of n independent draws, sampled directly."""
        raise NotImplementedError(f"{self.kind} rows have no exact superposition")

    def zero_probability(self, columns) -> float | None:
        """P(V_j = 0 for every j in columns), or None when unknown."""
        return None

    def vlogv_finite(self) -> bool | None:
        return True

    @abstractmethod
    def describe(self) -> dict: ...

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.describe()})"


class PoissonRow(OffspringRow):
    """Independent Poisson(rates[j]) counts per column."""

    kind = "poisson"

    def __init__(self, rates):
        self.rates = _vector(rates, "Poisson rates")
        self.q = self.rates.size

    def sample(self, n, rng):
        return rng.poisson(self.rates, size=(n, self.q)).astype(COUNT_DTYPE)

    def superpose(self, n, rng):
        expected = float(n) * self.rates
        _check_total(expected)
        return rng.poisson(expected).astype(COUNT_DTYPE)

    def closed_form_mean(self):
        return self.rates.copy()

    def zero_probability(self, columns):
        return float(np.exp(-self.rates[list(columns)].sum()))

    def describe(self):
        return {"kind": self.kind, "rates": self.rates.tolist()}


class GeometricRow(OffspringRow):
    """Independent geometric counts on {0, 1, ...} with the given means."""

    kind = "geometric"

    def __init__(self, means):
        self.means = _vector(means, "Geometric means")
        self.q = self.means.size
        self.success = 1.0 / (1.0 + self.means)

    def sample(self, n, rng):
        return (rng.geometric(self.success, size=(n, self.q)) - 1).astype(COUNT_DTYPE)

    def superpose(self, n, rng):
        _check_total(float(n) * self.means)
        out = np.zeros(self.q, dtype=COUNT_DTYPE)
        if n == 0:
            return out
        live = self.means > 0
        out[live] = rng.negative_binomial(n, self.success[live]).astype(COUNT_DTYPE)
        return out

    def closed_form_mean(self):
        return self.means.copy()

    def zero_probability(self, columns):
        return float(np.prod(self.success[list(columns)]))

    def describe(self):
        return {"kind": self.kind, "means": self.means.tolist()}


class DeterministicRow(OffspringRow):
    kind = "deterministic"

    def __init__(self, vector):
        values = _vector(vector, "Deterministic offspring")
        if np.any(values != np.floor(values)):
            raise ValueError("Deterministic offspring must be integers")
        self.vector = values.astype(COUNT_DTYPE)
        self.q = self.vector.size

    def sample(self, n, rng):
        return np.tile(self.vector, (n, 1))

    def superpose(self, n, rng):
        _check_total(float(n) * self.vector.astype(float))
        return self.vector * COUNT_DTYPE(n)

    def closed_form_mean(self):
        return self.vector.astype(float)

    def zero_probability(self, columns):
        return float(np.all(self.vector[list(columns)] == 0))

    def describe(self):
        return {"kind": self.kind, "vector": self.vector.tolist()}


class EmpiricalRow(OffspringRow):
    """Finite-support law: support[k] with probability weights[k]."""

    kind = "empirical"

    def __init__(self, support, weights):
        points = np.asarray(support, dtype=float)
        if points.ndim != 2 or points.shape[0] == 0:
            raise DimensionMismatch("Empirical support must be a non-empty list of vectors")
        if np.any(points < 0) or np.any(points != np.floor(points)):
            raise ValueError("Empirical support points must be nonnegative integers")
        weights = _vector(weights, "Empirical weights")
        if weights.size != points.shape[0]:
            raise DimensionMismatch("One weight per support point is required")
        if abs(weights.sum() - 1.0) > 1e-9:
            raise ValueError(f"Empirical weights must sum to 1, got {weights.sum():.12g}")
        self.support = points.astype(COUNT_DTYPE)
        self.weights = weights / weights.sum()
        self.q = points.shape[1]

    def sample(self, n, rng):
        return self.support[rng.choice(self.weights.size, size=n, p=self.weights)]

    def superpose(self, n, rng):
        _check_total(float(n) * self.closed_form_mean())
        counts = rng.multinomial(n, self.weights).astype(COUNT_DTYPE)
        return (counts[:, None] * self.support).sum(axis=0, dtype=COUNT_DTYPE)

    def closed_form_mean(self):
        return self.weights @ self.support.astype(float)

    def zero_probability(self, columns):
        vanish = np.all(self.support[:, list(columns)] == 0, axis=1)
        return float(self.weights[vanish].sum())

    def describe(self):
        return {"kind": self.kind, "support": self.support.tolist(), "weights": self.weights.tolist()}


class TotalThenThinRow(OffspringRow):
    """Bisexual row: U_j children of type j, each female with probability alpha.

    Output columns are (X_1..X_k, Y_1..Y_k): daughters then sons per type.
    Totals and sex flags come from separate substreams of the supplied
    generator.
    """

    kind = "total_then_thin"

    def __init__(self, totals, alpha: float, total_law: str = "poisson"):
        self.totals = _vector(totals, "Total offspring means")
        if not 0.0 <= alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
        if total_law not in ("poisson", "geometric"):
            raise ValueError(f"total_law must be poisson or geometric, got {total_law!r}")
        self.alpha = float(alpha)
        self.total_law = total_law
        self.k = self.totals.size
        self.q = 2 * self.k

    def _thin(self, totals: np.ndarray, rng) -> np.ndarray:
        daughters = rng.binomial(totals.astype(np.int64), self.alpha).astype(COUNT_DTYPE)
        return np.concatenate([daughters, totals - daughters], axis=-1)

    def sample(self, n, rng):
        total_rng, thin_rng = rng.spawn(2)
        if self.total_law == "poisson":
            totals = total_rng.poisson(self.totals, size=(n, self.k))
        else:
            totals = total_rng.geometric(1.0 / (1.0 + self.totals), size=(n, self.k)) - 1
        return self._thin(totals.astype(COUNT_DTYPE), thin_rng)

    def superpose(self, n, rng):
        _check_total(float(n) * self.totals)
        total_rng, thin_rng = rng.spawn(2)
        if self.total_law == "poisson":
            totals = total_rng.poisson(float(n) * self.totals)
        else:
            totals = np.zeros(self.k, dtype=np.int64)
            live = self.totals > 0
            if n:
                totals[live] = total_rng.negative_binomial(n, 1.0 / (1.0 + self.totals[live]))
        return self._thin(np.asarray(totals).astype(COUNT_DTYPE), thin_rng)

    def closed_form_mean(self):
        return np.concatenate([self.alpha * self.totals, (1.0 - self.alpha) * self.totals])

    def zero_probability(self, columns):
        columns = set(int(c) for c in columns)
        probability = 1.0
        for j, mean in enumerate(self.totals):
            female, male = j in columns, (j + self.k) in columns
            if not (female or male):
                continue
            share = 1.0 if female and male else (self.alpha if female else 1.0 - self.alpha)
            if self.total_law == "poisson":
                probability *= np.exp(-mean * share)
            else:
                probability *= 1.0 / (1.0 + mean * share)
        return float(probability)

    def describe(self):
        return {
            "kind": self.kind,
            "totals": self.totals.tolist(),
            "alpha": self.alpha,
            "total_law": self.total_law,
        }


class CallbackRow(OffspringRow):
    """User sampler `sampler(n, rng) -> (n, q)` array; means are estimated."""

    kind = "callback"
    exact_superposition = False

    def __init__(self, sampler: Callable, q: int, name: str | None = None):
        if q < 1:
            raise ValueError("Callback rows need q >= 1")
        self.sampler = sampler
        self.q = q
        self.name = name or getattr(sampler, "__name__", "callback")

    def sample(self, n, rng):
        draws = np.asarray(self.sampler(n, rng))
        if draws.shape != (n, self.q):
            raise DimensionMismatch(f"Sampler {self.name} returned shape {draws.shape}, expected {(n, self.q)}")
        if np.any(draws < 0) or np.any(draws != np.floor(draws)):
            raise ValueError(f"Sampler {self.name} must return nonnegative integers")
        return draws.astype(COUNT_DTYPE)

    def closed_form_mean(self):
        return None

    def vlogv_finite(self):
        return None

    def describe(self):
        return {"kind": self.kind, "name": self.name, "q": self.q}


class OffspringLaw:
    """p mutually independent offspring rows, all of length q."""

    def __init__(self, rows):
        self.rows = tuple(rows)
        if not self.rows:
            raise DimensionMismatch("An offspring law needs at least one row")
        lengths = {row.q for row in self.rows}
        if len(lengths) != 1:
            raise DimensionMismatch(f"Offspring rows disagree on q: {sorted(lengths)}")

    @property
    def p(self) -> int:
        return len(self.rows)

    @property
    def q(self) -> int:
        return self.rows[0].q

    def vlogv_finite(self) -> bool | None:
        """Whether E(V log V) < infinity for every entry (None if unknown)."""
        flags = [row.vlogv_finite() for row in self.rows]
        if any(flag is False for flag in flags):
            return False
        return None if any(flag is None for flag in flags) else True

    def describe(self) -> dict:
        return {"rows": [row.describe() for row in self.rows]}

    @classmethod
    def poisson_product(cls, matrix) -> OffspringLaw:
        return cls(PoissonRow(row) for row in np.atleast_2d(np.asarray(matrix, dtype=float)))

    @classmethod
    def geometric_product(cls, matrix) -> OffspringLaw:
        return cls(GeometricRow(row) for row in np.atleast_2d(np.asarray(matrix, dtype=float)))

    @classmethod
    def deterministic(cls, matrix) -> OffspringLaw:
        return cls(DeterministicRow(row) for row in np.atleast_2d(np.asarray(matrix, dtype=float)))

    def __repr__(self) -> str:
        return f"OffspringLaw(p={self.p}, q={self.q}, kinds={[row.kind for row in self.rows]})"


def build_row(entry: dict) -> OffspringRow:
    """Builds one row from its config block ({"kind": ..., params})."""
    match entry.get("kind"):
        case "poisson":
            return PoissonRow(entry["rates"])
        case "geometric":
            return GeometricRow(entry["means"])
        case "deterministic":
            return DeterministicRow(entry["vector"])
        case "empirical":
            return EmpiricalRow(entry["support"], entry["weights"])
        case "total_then_thin":
            return TotalThenThinRow(entry["totals"], entry["alpha"], entry.get("total_law", "poisson"))
        case "callback":
            from ..mating.core import load_plugin

            return CallbackRow(load_plugin(entry["plugin"]), int(entry["q"]), name=entry["plugin"])
    raise UnknownOffspringKind(f"Unknown offspring row kind {entry.get('kind')!r}")


def build_offspring(block: dict) -> OffspringLaw:
    """Builds an offspring law from a config block.

    Either {"rows": [row blocks]} or a product shorthand
    {"kind": "poisson_product" | "geometric_product" | "deterministic", "matrix": [[...]]}.
    """
    if block.get("rows"):
        return OffspringLaw(build_row(entry) for entry in block["rows"])
    match block.get("kind"):
        case "poisson_product":
            return OffspringLaw.poisson_product(block["matrix"])
        case "geometric_product":
            return OffspringLaw.geometric_product(block["matrix"])
        case "deterministic":
            return OffspringLaw.deterministic(block["matrix"])
    raise UnknownOffspringKind(f"Unknown offspring law kind {block.get('kind')!r}")
