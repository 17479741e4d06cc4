from .core import (
    lln_experiment,
    profile_experiment,
    corridor_experiment,
    supermartingale_experiment,
    domination_experiment,
    extinction_sweep,
    EXPERIMENTS,
)
from .report import ExperimentReport, Thresholds, mean_and_stderr
from .oracles import (
    ExactLaw,
    exact_law,
    transition_law,
    row_sum_law,
    gw_extinction_probability,
    poisson_extinction_probability,
    perron_pair,
    matrix_primitivity_index,
    fidelity_mean,
)
from .exceptions import (
    ExperimentError,
    UnknownExperiment,
    NoSurvivors,
    PreconditionFailed,
    OracleUnsupported,
)

__all__ = [
    # Experiments
    "lln_experiment",
    "profile_experiment",
    "corridor_experiment",
    "supermartingale_experiment",
    "domination_experiment",
    "extinction_sweep",
    "EXPERIMENTS",
    # Reports
    "ExperimentReport",
    "Thresholds",
    "mean_and_stderr",
    # Oracles
    "ExactLaw",
    "exact_law",
    "transition_law",
    "row_sum_law",
    "gw_extinction_probability",
    "poisson_extinction_probability",
    "perron_pair",
    "matrix_primitivity_index",
    "fidelity_mean",
    # Exceptions
    "ExperimentError",
    "UnknownExperiment",
    "NoSurvivors",
    "PreconditionFailed",
    "OracleUnsupported",
]
