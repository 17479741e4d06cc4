"""Randomized property checks for mating functions."""

from __future__ import annotations
from dataclasses import dataclass, field
import numpy as np
from ..log import logger
from .core import MatingFunction


@dataclass(frozen=True)
class Counterexample:
    x1: tuple[int, ...]
    x2: tuple[int, ...]
    lhs: tuple[int, ...]
    rhs: tuple[int, ...]

    def __str__(self) -> str:
        return f"x1={list(self.x1)}, x2={list(self.x2)}: {list(self.lhs)} < {list(self.rhs)}"


@dataclass(frozen=True)
class CheckReport:
    """Outcome of a randomized property check; counterexamples are data."""

    property: str
    samples: int
    magnitude_cap: int
    seed: int
    counterexamples: tuple[Counterexample, ...] = field(default=())

    @property
    def passed(self) -> bool:
        return not self.counterexamples

    def describe(self) -> dict:
        return {
            "property": self.property,
            "samples": self.samples,
            "magnitude_cap": self.magnitude_cap,
            "seed": self.seed,
            "passed": self.passed,
            "counterexamples": [str(c) for c in self.counterexamples],
        }


def _draw_pairs(q: int, samples: int, magnitude_cap: int, seed: int):
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    x1 = rng.integers(0, magnitude_cap, size=(samples, q), endpoint=True, dtype=np.uint64)
    x2 = rng.integers(0, magnitude_cap, size=(samples, q), endpoint=True, dtype=np.uint64)
    return x1, x2


def _collect(x1, x2, lhs, rhs, limit: int) -> tuple[Counterexample, ...]:
    bad = np.flatnonzero(np.any(lhs < rhs, axis=1))[:limit]
    return tuple(
        Counterexample(
            tuple(int(v) for v in x1[k]),
            tuple(int(v) for v in x2[k]),
            tuple(int(v) for v in lhs[k]),
            tuple(int(v) for v in rhs[k]),
        )
        for k in bad
    )


def check_superadditivity(
    mating: MatingFunction,
    samples: int = 10_000,
    magnitude_cap: int = 50,
    seed: int = 0,
    limit: int = 20,
) -> CheckReport:
    """Tests xi(x1 + x2) >= xi(x1) + xi(x2) on uniform pairs from {0..cap}^q.

    Counterexamples are always searched for in the supplied pairs and, since
    small vectors are where rounding bites, on all pairs of unit vectors too.
    """
    if samples < 1:
        raise ValueError("samples must be at least 1")
    x1, x2 = _draw_pairs(mating.q, samples, magnitude_cap, seed)
    units = np.eye(mating.q, dtype=np.uint64)
    u1 = np.repeat(units, mating.q, axis=0)
    u2 = np.tile(units, (mating.q, 1))
    x1, x2 = np.vstack([u1, x1]), np.vstack([u2, x2])

    lhs = mating.apply(x1 + x2).astype(np.int64)
    rhs = mating.apply(x1).astype(np.int64) + mating.apply(x2).astype(np.int64)
    found = _collect(x1, x2, lhs, rhs, limit)
    report = CheckReport("superadditivity", samples, magnitude_cap, seed, found)
    if found:
        logger.warning("Superadditivity check failed", mating=repr(mating), first=str(found[0]))
    else:
        logger.debug("Superadditivity check passed", mating=repr(mating), samples=samples)
    return report


def check_monotonicity(
    mating: MatingFunction,
    samples: int = 10_000,
    magnitude_cap: int = 50,
    seed: int = 0,
    limit: int = 20,
) -> CheckReport:
    """Tests xi(x) <= xi(x + d) for random x and nonnegative increments d.

    Counterexamples are reported as (x, d) pairs with xi(x + d) < xi(x).
    """
    if samples < 1:
        raise ValueError("samples must be at least 1")
    x, d = _draw_pairs(mating.q, samples, magnitude_cap, seed)
    lhs = mating.apply(x + d).astype(np.int64)
    rhs = mating.apply(x).astype(np.int64)
    found = _collect(x, d, lhs, rhs, limit)
    if found:
        logger.warning("Monotonicity check failed", mating=repr(mating), first=str(found[0]))
    return CheckReport("monotonicity", samples, magnitude_cap, seed, found)
