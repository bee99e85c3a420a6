"""Simulation and analysis toolkit for passive vibration-driven capsule locomotion.

A capsule with an internal pendulum rides a vertically shaken base; asymmetric
drag rectifies the pendulum's resonant motion into net horizontal drift.  The
package integrates the full model, two reduced models (an oscillatory slow
flow and a rotatory averaged flow), and the fixed-point, stability and
bifurcation analysis connecting them.
"""

from . import averaged, config, integrator, kernels, model, slowflow, svgfig, sweeps, tables
from ._numba import NUMBA_AVAILABLE, numba_enabled
from .errors import ConfigError, DivergenceError, DomainError
from .integrator import (IntegratorOptions, SeriesStats, integrate, integrate_full,
                         mean_steady_velocity, running_average)
from .model import (FullState, NondimParams, PhysicalParams, Trajectory,
                    damping_coefficient, nondimensionalize, redimensionalize, rhs_full)

__version__ = "0.1.0"

__all__ = [
    "averaged", "config", "integrator", "kernels", "model", "slowflow", "svgfig",
    "sweeps", "tables",
    "NUMBA_AVAILABLE", "numba_enabled",
    "ConfigError", "DivergenceError", "DomainError",
    "IntegratorOptions", "SeriesStats", "integrate", "integrate_full",
    "mean_steady_velocity", "running_average",
    "FullState", "NondimParams", "PhysicalParams", "Trajectory",
    "damping_coefficient", "nondimensionalize", "redimensionalize", "rhs_full",
    "__version__",
]
