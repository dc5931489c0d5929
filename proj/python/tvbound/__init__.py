"""Bound-constrained total-variation inversion."""

from ._tvbound import *  # noqa: F401,F403
from ._tvbound import (  # noqa: F401
    DimensionError,
    DivergenceError,
    DomainError,
    Error,
    SolverConfig,
)

__version__ = "0.1.0"
