"""Blocking, capacity and energy analysis of partially open femtocell networks."""

from . import energy, markov, mcsim, phy, solver, traffic
from .domain import BlockingProbs, RadioParams, SystemParams, validate
from .energy import EfficiencyReport, efficiency
from .exceptions import FemtoflowError, NoConvergenceError, ValidationError
from .solver import Solution, SolverConfig, solve

__version__ = "0.1.0"

__all__ = [
    "BlockingProbs",
    "EfficiencyReport",
    "FemtoflowError",
    "NoConvergenceError",
    "RadioParams",
    "Solution",
    "SolverConfig",
    "SystemParams",
    "ValidationError",
    "efficiency",
    "energy",
    "markov",
    "mcsim",
    "phy",
    "solve",
    "solver",
    "traffic",
    "validate",
]
