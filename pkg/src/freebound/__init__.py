"""Numerical checks of monotonicity, Willmore and Li-Yau bounds for
free-boundary surfaces in the unit ball, plus tangent-point energies of
closed curves."""

from .geometry import (ClosedPolyline, ShapeError, ShapeSpec, TopologyError, TriangleMesh, generate_shape,
                       invert)
from .monotonicity import RadialProfile, SurfaceData, g_profile, integral_identity, monotonicity_check, tilde_density
from .optimizer import OptimizerConfig, minimize, objective_and_gradient
from .support import SupportSurface, ball_curvatures, support_inequality_check
from .tangent_point import curve_energy, kernel_matrix
from .willmore import WillmoreReport, li_yau_check, surface_data, willmore_energy

__version__ = "0.1.0"

__all__ = [
    "ClosedPolyline", "OptimizerConfig", "RadialProfile", "ShapeError", "ShapeSpec", "SupportSurface",
    "SurfaceData", "TopologyError", "TriangleMesh", "WillmoreReport", "ball_curvatures", "curve_energy",
    "g_profile", "generate_shape", "integral_identity", "invert", "kernel_matrix", "li_yau_check", "minimize",
    "monotonicity_check", "objective_and_gradient", "support_inequality_check", "surface_data",
    "tilde_density", "willmore_energy",
]
