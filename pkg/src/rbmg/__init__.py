"""Geometric multigrid and local Fourier analysis for the periodic Poisson problem."""

from .cycle import CoarseSolveError, build_plan, measure_cr, mg_cycle, solve, work_units
from .grid import CoarseningPlan, GridSpec, LevelGrid, build_hierarchy
from .lfa import LfaConfig, rho_two_level, smoothing_factor
from .stencil import Stencil, builtin, galerkin_stencil

__all__ = [
    "CoarseSolveError", "CoarseningPlan", "GridSpec", "LevelGrid", "LfaConfig", "Stencil",
    "build_hierarchy", "build_plan", "builtin", "galerkin_stencil", "measure_cr", "mg_cycle",
    "rho_two_level", "smoothing_factor", "solve", "work_units",
]
__version__ = "0.1.0"
