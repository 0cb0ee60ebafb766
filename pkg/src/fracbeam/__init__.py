"""Fractional-order nonlocal, geometrically nonlinear Euler-Bernoulli beam solver."""

from .errors import ConfigError, DomainError, FracBeamError, SolverError
from .kernel import FracParams, Horizon, horizon_at
from .mesh import DofLayout, Mesh, QuadRule
from .basis import NonlocalBasis, build_basis, frac_values

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "DomainError",
    "FracBeamError",
    "SolverError",
    "FracParams",
    "Horizon",
    "horizon_at",
    "DofLayout",
    "Mesh",
    "QuadRule",
    "NonlocalBasis",
    "build_basis",
    "frac_values",
]
