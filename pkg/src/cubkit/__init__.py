"""Cubature formulas, spherical designs, lattice shells and related diagnostics."""

from .errors import BudgetExceeded, CubkitError, ValidationError
from .pointsets import WeightedPointSet, dumps, load, loads, save
from .verify import StrengthReport, strength_kernel, strength_moments

__version__ = "0.1.0"

__all__ = [
    "BudgetExceeded",
    "CubkitError",
    "ValidationError",
    "WeightedPointSet",
    "StrengthReport",
    "dumps",
    "load",
    "loads",
    "save",
    "strength_kernel",
    "strength_moments",
]
