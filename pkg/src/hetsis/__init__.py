"""Heterogeneous SIS epidemics on finite type spaces.

Reproduction numbers as spectral radii of next-generation matrices, the
maximal endemic equilibrium, and vaccination strategies built from it.
"""
from ._backend import NAME as backend
from .builders import (
    AGE_LABELS,
    ActivityStructure,
    AgeContactData,
    activity_structured,
    age_activity,
    age_structured,
    example_models,
    homogeneous,
    isolated_blocks,
    proportionate_mixing,
)
from .dynamics import Trajectory, integrate, vaccinated_vector_field, vector_field
from .equilibrium import (
    EquilibriumResult,
    block_equilibria,
    maximal_equilibrium,
    ode_equilibrium,
    verify_equilibrium,
)
from .errors import ConvergenceError, DimensionError, HetsisError, MissingDataError, ModelValidationError
from .model import DiscreteSpace, SISModel, as_profile, integral, validate_model
from .spectral import (
    apply_operator,
    basic_reproduction_number,
    effective_reproduction_number,
    next_generation_matrix,
    spectral_bound,
    spectral_radius,
)
from .stability import LinearizedOperator, MaximalityReport, check_maximality, escape_direction, linearize
from .strategies import (
    StrategyEvaluation,
    calibrate_to_R0,
    cost,
    equilibrium_strategy,
    evaluate,
    two_group_equilibrium_strategy,
    two_group_optimal_strategy,
    uniform_critical,
)

__version__ = "0.1.0"
