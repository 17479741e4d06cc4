"""
Catalog of reference models with known eigenpairs, and the one-parameter
families used by extinction sweeps.

Imported explicitly (`from twosex.model import examples`) because it pulls
in the mating and offspring catalogs.
"""

from __future__ import annotations
from dataclasses import dataclass
from typing import Callable
import numpy as np
from ..mating.core import (
    CompletelyPromiscuous,
    Identity,
    MinOfLinear,
    PerfectFidelity,
    Polygamous,
    PromiscuousSingle,
)
from ..simulation.laws import (
    DeterministicRow,
    EmpiricalRow,
    OffspringLaw,
    PoissonRow,
    TotalThenThinRow,
)
from .core import ModelSpec


def identity_poisson(matrix, name: str = "identity_poisson") -> ModelSpec:
    """Asexual multi-type Galton-Watson process: M(z) = zV."""
    values = np.atleast_2d(np.asarray(matrix, dtype=float))
    p = values.shape[0]
    return ModelSpec(p, p, Identity(p), OffspringLaw.poisson_product(values), name=name)


def asexual_poisson(mu: float) -> ModelSpec:
    return identity_poisson([[mu]], name="asexual_poisson")


def perfect_fidelity_symmetric(
    p: int, alpha: float, beta: float, alpha_m: float, beta_m: float
) -> ModelSpec:
    """Poisson offspring with X = alpha*I + beta*1 and Y = alpha_m*I + beta_m*1.

    lambda* = min(alpha + beta*p, alpha_m + beta_m*p), z* = (1/p, ..., 1/p).
    """
    eye, ones = np.eye(p), np.ones((p, p))
    rates = np.hstack([alpha * eye + beta * ones, alpha_m * eye + beta_m * ones])
    return ModelSpec(
        p, 2 * p, PerfectFidelity(p), OffspringLaw.poisson_product(rates), split=(p, p), name="perfect_fidelity_symmetric"
    )


def proportional_sex_assignment(totals, alpha: float, total_law: str = "poisson") -> ModelSpec:
    """Children counted by type, then each made female with probability alpha.

    X = alpha*U and Y = (1 - alpha)*U, so lambda* = min(alpha, 1 - alpha)*lambda_U.
    """
    matrix = np.atleast_2d(np.asarray(totals, dtype=float))
    p = matrix.shape[0]
    rows = [TotalThenThinRow(row, alpha, total_law) for row in matrix]
    return ModelSpec(p, 2 * p, PerfectFidelity(p), OffspringLaw(rows), split=(p, p), name="proportional_sex_assignment")


def completely_promiscuous(females, males) -> ModelSpec:
    """M(z) = zX * 1{zY > 0}: linear in zX as soon as every male type is produced."""
    x = np.atleast_2d(np.asarray(females, dtype=float))
    y = np.atleast_2d(np.asarray(males, dtype=float))
    p, n_m = x.shape[0], y.shape[1]
    return ModelSpec(
        p,
        p + n_m,
        CompletelyPromiscuous(p, n_m),
        OffspringLaw.poisson_product(np.hstack([x, y])),
        split=(p, n_m),
        name="completely_promiscuous",
    )


def single_type_fidelity(mu_f: float, mu_m: float) -> ModelSpec:
    """One couple type, Poisson daughters and sons; lambda* = min(mu_f, mu_m)."""
    return ModelSpec(
        1, 2, PerfectFidelity(1), OffspringLaw([PoissonRow([mu_f, mu_m])]), split=(1, 1), name="single_type_fidelity"
    )


def promiscuous_single(mu_f: float, mu_m: float) -> ModelSpec:
    """Every female mates if one male exists; lambda* = mu_f whenever mu_m > 0."""
    return ModelSpec(
        1, 2, PromiscuousSingle(), OffspringLaw([PoissonRow([mu_f, mu_m])]), split=(1, 1), name="promiscuous_single"
    )


def polygamous(d: int, mu_f: float, mu_m: float) -> ModelSpec:
    """Each male mates with up to d females; lambda* = min(mu_f, d*mu_m)."""
    return ModelSpec(
        1, 2, Polygamous(d), OffspringLaw([PoissonRow([mu_f, mu_m])]), split=(1, 1), name="polygamous"
    )


def deterministic_fidelity(daughters: int = 1, sons: int = 1) -> ModelSpec:
    return ModelSpec(
        1,
        2,
        PerfectFidelity(1),
        OffspringLaw([DeterministicRow([daughters, sons])]),
        split=(1, 1),
        name="deterministic_fidelity",
    )


def recurrent_counterexample() -> ModelSpec:
    """xi(x, y) = (floor(y/2), x) with V_1 ~ (2,0) or (0,2) evenly and V_2 = (0,1).

    Primitive but not strongly primitive; {(1,0), (0,2)} is a recurrent
    class, so transitivity fails.
    """
    rows = [
        EmpiricalRow([[2, 0], [0, 2]], [0.5, 0.5]),
        DeterministicRow([0, 1]),
    ]
    return ModelSpec(2, 2, MinOfLinear([[[0.0, 1.0], [0.5, 0.0]]]), OffspringLaw(rows), name="recurrent_counterexample")


@dataclass(frozen=True)
class Family:
    """One-parameter model family with a closed-form lambda* when known."""

    name: str
    parameter: str
    build: Callable[..., ModelSpec]
    lambda_star: Callable[..., float | None]
    defaults: dict

    def model(self, value: float, **fixed) -> ModelSpec:
        return self.build(value, **{**self.defaults, **fixed})

    def exact_lambda(self, value: float, **fixed) -> float | None:
        return self.lambda_star(value, **{**self.defaults, **fixed})


FAMILIES = {
    "single_type_fidelity": Family(
        "single_type_fidelity",
        "mu_f",
        lambda mu_f, mu_m: single_type_fidelity(mu_f, mu_m),
        lambda mu_f, mu_m: min(mu_f, mu_m),
        {"mu_m": 2.0},
    ),
    "asexual_poisson": Family(
        "asexual_poisson",
        "mu",
        lambda mu: asexual_poisson(mu),
        lambda mu: mu,
        {},
    ),
    "fidelity_symmetric": Family(
        "fidelity_symmetric",
        "beta",
        lambda beta, p, alpha, alpha_m, beta_m: perfect_fidelity_symmetric(p, alpha, beta, alpha_m, beta_m),
        lambda beta, p, alpha, alpha_m, beta_m: min(alpha + beta * p, alpha_m + beta_m * p),
        {"p": 2, "alpha": 0.5, "alpha_m": 1.0, "beta_m": 0.1},
    ),
    "promiscuous_single": Family(
        "promiscuous_single",
        "mu_f",
        lambda mu_f, mu_m: promiscuous_single(mu_f, mu_m),
        lambda mu_f, mu_m: mu_f if mu_m > 0 else 0.0,
        {"mu_m": 5.0},
    ),
}

CATALOG = {
    "identity_poisson": identity_poisson,
    "asexual_poisson": asexual_poisson,
    "perfect_fidelity_symmetric": perfect_fidelity_symmetric,
    "proportional_sex_assignment": proportional_sex_assignment,
    "completely_promiscuous": completely_promiscuous,
    "single_type_fidelity": single_type_fidelity,
    "promiscuous_single": promiscuous_single,
    "polygamous": polygamous,
    "deterministic_fidelity": deterministic_fidelity,
    "recurrent_counterexample": recurrent_counterexample,
}
