"""Shot-frugal QAOA MAX-CUT workbench.

Exact statevector simulation of depth-p alternating circuits over diagonal
cost Hamiltonians, a shot-limited sampling objective, and two gradient-free
optimizers (dual annealing, natural evolution strategies) that work with as
little as one measurement per parameter point.
"""

__version__ = "0.1.0"

from .analysis import KdeEstimate, kde, summarize, variance_bound
from .anneal import (
    AnnealConfig,
    GelfandSchedule,
    acceptance_probability,
    anneal_run,
    sample_visit,
    shot_schedule,
    two_state_noisy_chain,
    visiting_temperature,
)
from .graph import (
    Assignment,
    WeightedGraph,
    brute_force_max_cut,
    cut_value,
    energy,
    generate_graph,
    load_graph,
    positive_cover_number,
    save_graph,
)
from .nes import NesConfig, PopulationSample, estimate_gradient, nes_run, sample_population
from .qaoa import (
    DiagonalEnergies,
    Landscape,
    QaoaParams,
    ShotObjective,
    diagonal_energies,
    evolve,
    exact_expectation,
    landscape_grid,
    sample_shots,
)
from .trajectory import FunctionObjective, OptimizeResult, Trajectory, TrajectoryRecord
from .util import ResourceLimitError, wrap_to_bounds

__all__ = [
    "Assignment",
    "AnnealConfig",
    "DiagonalEnergies",
    "FunctionObjective",
    "GelfandSchedule",
    "KdeEstimate",
    "Landscape",
    "NesConfig",
    "OptimizeResult",
    "PopulationSample",
    "QaoaParams",
    "ResourceLimitError",
    "ShotObjective",
    "Trajectory",
    "TrajectoryRecord",
    "WeightedGraph",
    "acceptance_probability",
    "anneal_run",
    "brute_force_max_cut",
    "cut_value",
    "diagonal_energies",
    "energy",
    "estimate_gradient",
    "evolve",
    "exact_expectation",
    "generate_graph",
    "kde",
    "landscape_grid",
    "load_graph",
    "nes_run",
    "positive_cover_number",
    "sample_population",
    "sample_shots",
    "sample_visit",
    "save_graph",
    "shot_schedule",
    "summarize",
    "two_state_noisy_chain",
    "variance_bound",
    "visiting_temperature",
    "wrap_to_bounds",
]
