"""Discrete-event simulation of synchronous and asynchronous parallel
evolutionary algorithms under genotype-dependent evaluation times."""

__version__ = "0.1.0"

from .core import Genotype, Individual, Population, hamming_normalized
from .engine import RunStats, Simulation, SimulationConfig, run_simulation
from .harness import ExperimentConfig, bisect_min_popsize, golden_min_time
from .problems import ProblemInstance, ankl_problem, dt_problem
from .rng import RandomSource

__all__ = [
    "__version__",
    "Genotype",
    "Individual",
    "Population",
    "hamming_normalized",
    "RunStats",
    "Simulation",
    "SimulationConfig",
    "run_simulation",
    "ExperimentConfig",
    "bisect_min_popsize",
    "golden_min_time",
    "ProblemInstance",
    "dt_problem",
    "ankl_problem",
    "RandomSource",
]
