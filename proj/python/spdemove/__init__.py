"""Spectral-Galerkin simulation and drift-parameter inference for a stochastic
advection-diffusion model of animal movement."""

from ._core import *  # noqa: F401,F403
from ._core import (
    DegenerateDataError,
    NumericalError,
    PathOverflowError,
    ReplicationError,
    SingularityError,
    ValidationError,
    main,
)

__version__ = "0.1.0"
