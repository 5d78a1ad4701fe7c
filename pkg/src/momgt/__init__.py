"""Moments of moments for Sp(2N) and SO(2N) via constrained Gelfand-Tsetlin patterns."""
from .errors import (
    IntegrityError,
    InvalidArgumentError,
    MomError,
    NearSingularError,
    ResourceLimitError,
)
from .lattice import (
    Limits,
    brute_force_count,
    build_constraints,
    count_constrained_so,
    count_constrained_so_signed,
    count_constrained_sp,
    count_sp_fixed_top,
)
from .polynomials import ExactPolynomial, evaluate, interpolate, mom_polynomial, reference_polynomial

__version__ = "0.1.0"

__all__ = [
    "ExactPolynomial", "IntegrityError", "InvalidArgumentError", "Limits", "MomError",
    "NearSingularError", "ResourceLimitError", "brute_force_count", "build_constraints",
    "count_constrained_so", "count_constrained_so_signed", "count_constrained_sp",
    "count_sp_fixed_top", "evaluate", "interpolate", "mom_polynomial", "reference_polynomial",
]
