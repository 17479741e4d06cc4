from __future__ import annotations
from dataclasses import dataclass, field
from hashlib import sha256
from typing import TYPE_CHECKING
import json
import numpy as np
from .exceptions import (
    DimensionMismatch,
    ModelValidationError,
    NonIntegrable,
    PopulationOverflow,
    ZeroColumn,
)

if TYPE_CHECKING:
    from ..mating import MatingFunction
    from ..simulation.laws import OffspringLaw

COUNT_DTYPE = np.uint64
U64_MAX = np.iinfo(np.uint64).max
INTEGRABILITY_CAP = 1e12


def population_vector(entries, length: int | None = None) -> np.ndarray:
    """Builds a nonnegative integer count vector (uint64).

    Raises:
        DimensionMismatch: wrong length or not one-dimensional.
        ValueError: negative or non-integral entries.
        PopulationOverflow: entries beyond the uint64 range.
    """
    raw = np.asarray(entries)
    if raw.ndim != 1:
        raise DimensionMismatch(f"Expected a vector, got shape {raw.shape}")
    if length is not None and raw.shape[0] != length:
        raise DimensionMismatch(f"Expected length {length}, got {raw.shape[0]}")
    if raw.dtype == COUNT_DTYPE:
        return raw.copy()
    as_float = raw.astype(float)
    if np.any(as_float < 0):
        raise ValueError("Population counts must be nonnegative")
    if np.any(as_float != np.floor(as_float)):
        raise ValueError("Population counts must be integers")
    if np.any(as_float >= 2.0**64):
        raise PopulationOverflow("Population count beyond the uint64 range")
    return np.array([int(value) for value in raw.tolist()], dtype=COUNT_DTYPE)


def real_vector(entries, length: int | None = None) -> np.ndarray:
    """Builds a nonnegative finite float vector."""
    vector = np.asarray(entries, dtype=float)
    if vector.ndim != 1:
        raise DimensionMismatch(f"Expected a vector, got shape {vector.shape}")
    if length is not None and vector.shape[0] != length:
        raise DimensionMismatch(f"Expected length {length}, got {vector.shape[0]}")
    if np.any(vector < 0) or not np.all(np.isfinite(vector)):
        raise ValueError("Real vectors must be finite and nonnegative")
    return vector


def add_counts(total: np.ndarray, increment: np.ndarray) -> np.ndarray:
    """Adds two count vectors, failing loudly instead of wrapping around."""
    if np.any(np.asarray(increment, dtype=COUNT_DTYPE) > U64_MAX - np.asarray(total, dtype=COUNT_DTYPE)):
        raise PopulationOverflow("Population count overflowed 64 bits")
    return np.asarray(total, dtype=COUNT_DTYPE) + np.asarray(increment, dtype=COUNT_DTYPE)


def sum_counts(samples: np.ndarray) -> np.ndarray:
    """Column sums of an (n, q) sample matrix as uint64, with overflow detection."""
    samples = np.asarray(samples)
    if samples.size == 0:
        return np.zeros(samples.shape[-1], dtype=COUNT_DTYPE)
    if np.any(samples.sum(axis=0, dtype=np.float64) >= float(U64_MAX)):
        raise PopulationOverflow("Population count overflowed 64 bits")
    return samples.sum(axis=0, dtype=COUNT_DTYPE)


def one_norm(vector) -> float:
    return float(np.sum(np.abs(np.asarray(vector, dtype=float))))


@dataclass(frozen=True)
class MeanMatrix:
    """Expected offspring: values[i, j] = E(V[i, j]) for a type-i couple."""

    values: np.ndarray
    stderr: np.ndarray
    exact: bool = True

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 2:
            raise DimensionMismatch("Mean matrix must be two-dimensional")
        if not np.all(np.isfinite(values)) or np.any(values < 0):
            raise ValueError("Mean matrix entries must be finite and nonnegative")
        values.setflags(write=False)
        stderr = np.asarray(self.stderr, dtype=float)
        stderr.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "stderr", stderr)

    @property
    def p(self) -> int:
        return self.values.shape[0]

    @property
    def q(self) -> int:
        return self.values.shape[1]

    def zero_columns(self) -> list[int]:
        return [int(j) for j in np.flatnonzero(self.values.sum(axis=0) <= 0)]

    def female_block(self, n_f: int) -> np.ndarray:
        return self.values[:, :n_f]

    def male_block(self, n_f: int) -> np.ndarray:
        return self.values[:, n_f:]


@dataclass(frozen=True)
class ModelSpec:
    p: int
    q: int
    mating: MatingFunction
    offspring: OffspringLaw
    split: tuple[int, int] | None = None
    name: str = "model"

    def describe(self) -> dict:
        return {
            "p": self.p,
            "q": self.q,
            "split": list(self.split) if self.split else None,
            "mating": self.mating.describe(),
            "offspring": self.offspring.describe(),
        }


@dataclass(frozen=True)
class Violation:
    assumption: str
    message: str

    def __str__(self) -> str:
        return f"{self.assumption}: {self.message}"


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __str__(self) -> str:
        return "; ".join(str(violation) for violation in self.violations) or "valid"


@dataclass(frozen=True)
class ValidatedModel:
    """An immutable, checked model; safe to share between worker threads."""

    spec: ModelSpec
    V: MeanMatrix
    fingerprint: str = field(default="")

    @property
    def p(self) -> int:
        return self.spec.p

    @property
    def q(self) -> int:
        return self.spec.q

    @property
    def mating(self) -> MatingFunction:
        return self.spec.mating

    @property
    def offspring(self) -> OffspringLaw:
        return self.spec.offspring

    @property
    def split(self) -> tuple[int, int] | None:
        return self.spec.split

    @property
    def name(self) -> str:
        return self.spec.name


def fingerprint(spec: ModelSpec) -> str:
    canonical = json.dumps(spec.describe(), sort_keys=True, separators=(",", ":"))
    return sha256(canonical.encode("utf-8")).hexdigest()


def mean_matrix(
    offspring: OffspringLaw,
    estimation_budget: int = 100_000,
    seed: int = 0,
    cap: float = INTEGRABILITY_CAP,
) -> MeanMatrix:
    """Mean reproduction matrix of an offspring law.

    Parametric and finite-support rows contribute their exact means.
    Rows without a closed form are estimated from `estimation_budget`
    draws; their standard errors are reported in `MeanMatrix.stderr`.

    Raises:
        ValueError: estimation_budget < 1.
        NonIntegrable: an estimate exceeds `cap` at some checkpoint.
        ZeroColumn: some column sums to zero.
    """
    if estimation_budget < 1:
        raise ValueError("estimation_budget must be at least 1")

    rows, errors, exact = [], [], True
    for i, row in enumerate(offspring.rows):
        closed = row.closed_form_mean()
        if closed is not None:
            rows.append(np.asarray(closed, dtype=float))
            errors.append(np.zeros(row.q))
            continue

        exact = False
        rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(i,))))
        draws = np.asarray(row.sample(estimation_budget, rng), dtype=float)
        # cumulative means at quarter checkpoints must all stay below the cap
        for stop in sorted({max(1, estimation_budget * k // 4) for k in range(1, 5)}):
            estimate = draws[:stop].mean(axis=0)
            bad = np.flatnonzero(~np.isfinite(estimate) | (estimate > cap))
            if bad.size:
                raise NonIntegrable(i, int(bad[0]), float(estimate[bad[0]]), cap)
        rows.append(draws.mean(axis=0))
        spread = draws.std(axis=0, ddof=1) if estimation_budget > 1 else np.zeros(row.q)
        errors.append(spread / np.sqrt(estimation_budget))

    result = MeanMatrix(np.vstack(rows), np.vstack(errors), exact=exact)
    zero = result.zero_columns()
    if zero:
        raise ZeroColumn(zero)
    return result


def validate_model(
    spec: ModelSpec, estimation_budget: int = 100_000, seed: int = 0
) -> ValidatedModel | ValidationReport:
    """Checks a model specification.

    Returns a ValidatedModel when every check passes, otherwise a
    ValidationReport listing each violated assumption.
    """
    violations = []

    def violate(assumption: str, message: str):
        violations.append(Violation(assumption, message))

    if spec.p < 1 or spec.q < 1:
        violate("dimensions", f"p={spec.p} and q={spec.q} must both be at least 1")
    if spec.split is not None:
        n_f, n_m = spec.split
        if n_f < 1 or n_m < 1 or n_f + n_m != spec.q:
            violate("bisexual split", f"(n_f, n_m)=({n_f}, {n_m}) must be positive and sum to q={spec.q}")
    if (spec.mating.p, spec.mating.q) != (spec.p, spec.q):
        violate(
            "dimensions",
            f"mating function maps N^{spec.mating.q} -> N^{spec.mating.p}, model declares q={spec.q}, p={spec.p}",
        )
    if spec.offspring.p != spec.p or spec.offspring.q != spec.q:
        violate(
            "dimensions",
            f"offspring law has {spec.offspring.p} rows of length {spec.offspring.q}, expected {spec.p} x {spec.q}",
        )
    if not spec.mating.verified:
        violate("superadditivity", "mating function is unverified; run check_superadditivity first")

    if not violations:
        try:
            image = spec.mating.apply(np.zeros(spec.q, dtype=COUNT_DTYPE))
            if np.any(image != 0):
                violate("xi(0)=0", f"xi(0)={image.tolist()} fails")
        except Exception as e:
            violate("xi(0)=0", f"mating function failed on the zero vector: {e}")

    V = None
    if not violations:
        try:
            V = mean_matrix(spec.offspring, estimation_budget, seed)
        except ZeroColumn as e:
            violate("column sum positive", f"column sum positive fails for column(s) {e.columns}")
        except NonIntegrable as e:
            violate("integrability", str(e))

    if violations:
        return ValidationReport(tuple(violations))
    return ValidatedModel(spec, V, fingerprint(spec))


def require_valid(spec: ModelSpec, estimation_budget: int = 100_000, seed: int = 0) -> ValidatedModel:
    """validate_model, raising ModelValidationError instead of returning a report."""
    result = validate_model(spec, estimation_budget, seed)
    if isinstance(result, ValidationReport):
        raise ModelValidationError(result)
    return result
