"""Numerical laboratory for Ginzburg-Landau vortices over the plane and their bubble trees."""

from ._accel import backend
from .config import ZeroConfig, SolverParams
from .errors import *  # noqa: F401,F403
from .vortex import VortexSolution, solve_vortex, default_params

__version__ = "0.1.0"
