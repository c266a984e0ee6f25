"""Cumulant-expansion moment equations and their numeric compilation."""

from .algebra import (
    IDENTITY,
    Coeff,
    Moment,
    Monomial,
    NonlinearParameterError,
    UnsupportedOrderError,
    canonical_moment,
    close_expression,
    close_monomial,
    combine_units,
    commutator,
    dissipator_heisenberg,
    expr_dagger,
    expr_iadd,
    expr_mul,
    expr_scale,
    mono_a,
    mono_adag,
    mono_mul,
    mono_sigma,
    moment_label,
    unit_factors,
)
from .system import (
    ClosureError,
    MomentSystem,
    SymbolicLaserModel,
    build_moment_system,
    cumulant_close,
    heisenberg_rhs,
)
from .compile import CompiledSystem, MissingBindingError, compile_system
from .regression import NotConvergedError, RegressionSystem, build_regression_system

__all__ = [
    "IDENTITY",
    "Coeff",
    "Moment",
    "Monomial",
    "NonlinearParameterError",
    "UnsupportedOrderError",
    "canonical_moment",
    "close_expression",
    "close_monomial",
    "combine_units",
    "commutator",
    "dissipator_heisenberg",
    "expr_dagger",
    "expr_iadd",
    "expr_mul",
    "expr_scale",
    "mono_a",
    "mono_adag",
    "mono_mul",
    "mono_sigma",
    "moment_label",
    "unit_factors",
    "ClosureError",
    "MomentSystem",
    "SymbolicLaserModel",
    "build_moment_system",
    "cumulant_close",
    "heisenberg_rhs",
    "CompiledSystem",
    "MissingBindingError",
    "compile_system",
    "NotConvergedError",
    "RegressionSystem",
    "build_regression_system",
]
