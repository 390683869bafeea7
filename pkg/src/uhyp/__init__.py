"""Pseudospectral solver and cone-identity verification for the ultrahyperbolic characteristic problem"""

from .cone import (
    ConeAmplitude,
    ConePoint,
    ConeResolution,
    ConeSolver,
    ConeTestFunction,
    amplitude_eval,
    cone_lift,
    integrate_cone_branches,
    integrate_cone_parametrized,
    integrate_cone_spherical,
    solution_via_cone,
    sphere_quadrature,
)
from .errors import UhypError
from .grid import Field, GaussianPacket, GridSpec, InitialData, l2_norm, mode_field, sample
from .propagator import (
    MultiplierPolicy,
    Trajectory,
    ZeroPlaneRule,
    evolve,
    evolve_trajectory,
    multiplier,
    pde_residual,
)
from .spectral import FrequencyGrid, SpectralField, forward, inverse, plancherel_ratio

__version__ = "0.1.0"
