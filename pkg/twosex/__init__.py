"""
    twosex
    ~~~~~~

    Multi-type bisexual Galton-Watson branching processes: simulation with
    reproducible counter-based streams, the concave mean growth operator M
    and its eigenpair (lambda*, z*), the extinction criterion, and Monte
    Carlo experiments that check the limit theorems at desk scale.
"""

from . import log, schema, decorators, model, mating, operator, eigen, simulation, experiments, cli

__version__ = "0.1.0"
__all__ = [
    "log",
    "schema",
    "decorators",
    "model",
    "mating",
    "operator",
    "eigen",
    "simulation",
    "experiments",
    "cli",
]
