"""Finite-difference solvers for the 2D compressible Euler equations.

state    conservative/primitive conversions, fluxes, wave speeds
schemes  the labeled scheme registry (upwind, MacCormack, Lax-Wendroff,
         artificial-viscosity variants, WENO3/WENO5)
boundary ghost-layer fillers (case inflow/outflow, periodic)
march    pseudo-time marching to steady state
"""

from .boundary import make_case_filler, periodic_fill
from .march import (RunResult, conservative_to_container,
                    container_to_conservative, march_to_steady)
from .schemes import SCHEME_LABELS, SCHEMES, Scheme, SchemeSpec, get_scheme
from .state import (GAMMA, NCOMP, PositivityError, conservative_from_primitive,
                    directional_max_speeds, flux_x, flux_y, max_wave_speed,
                    primitive_from_conservative, sound_speed, uniform_state)

__all__ = [
    "GAMMA", "NCOMP", "PositivityError", "RunResult", "SCHEMES",
    "SCHEME_LABELS", "Scheme", "SchemeSpec", "conservative_from_primitive",
    "conservative_to_container", "container_to_conservative",
    "directional_max_speeds", "flux_x", "flux_y", "get_scheme",
    "make_case_filler", "march_to_steady", "max_wave_speed", "periodic_fill",
    "primitive_from_conservative", "sound_speed", "uniform_state",
]
