"""Linear stability of the elliptic Euler solutions of the three-body problem.

The pipeline runs from a mass triple to the collinear central configuration
and its mass parameter ``beta``, then for an eccentricity ``e`` to the
monodromy matrix of the essential linearized system, its normal form, and
the Maslov-type indices computed as Morse indices of a Galerkin operator.
"""

__version__ = "0.1.0"

from .atlas import (
    DegeneracyCurve,
    degenerate_betas,
    order_check,
    region_classify,
    region_grid,
    scan_slice,
    theorem_prediction,
    trace_curves,
)
from .central_config import CentralConfig, MassTriple, central_config, solve_euler_quintic
from .errors import (
    AmbiguityError,
    ClassificationConflict,
    ConfigurationError,
    ConvergenceError,
    DomainError,
    EulerStabError,
    InputError,
    IntegrationError,
    OrderingViolation,
)
from .index_theory import (
    analytic_e0_tables,
    beta_hat,
    classify,
    propagate_index,
    splitting_numbers,
)
from .monodromy import EssentialSystem, modified_path, monodromy
from .spectral import assemble, index_pair, kernel_by_recurrence, morse_index
from .symplectic import SymplecticMatrix

__all__ = [
    "AmbiguityError", "CentralConfig", "ClassificationConflict", "ConfigurationError",
    "ConvergenceError", "DegeneracyCurve", "DomainError", "EssentialSystem", "EulerStabError",
    "InputError", "IntegrationError", "MassTriple", "OrderingViolation", "SymplecticMatrix",
    "analytic_e0_tables", "assemble", "beta_hat", "central_config", "classify",
    "degenerate_betas", "index_pair", "kernel_by_recurrence", "modified_path", "monodromy",
    "morse_index", "order_check", "propagate_index", "region_classify", "region_grid",
    "scan_slice", "solve_euler_quintic", "splitting_numbers", "theorem_prediction",
    "trace_curves",
]
