"""Planar rarefaction waves for 2D viscous Burgers with a curved initial discontinuity.

Exact inviscid waves, the one-dimensional viscous profile with variable
viscosity, an explicit finite-difference solver and decay experiments.
"""
__version__ = "0.1.0"

from .errors import (  # noqa: F401
    CflViolation,
    ConfigError,
    DegenerateFit,
    HyperbolicityViolated,
    NoConvergence,
    NonFiniteValue,
    QuadratureNotConverged,
    RarefactionError,
    RegionBoundaryTooClose,
)
from .exactwave import RiemannData, eval_rarefaction  # noqa: F401
from .geometry import Line, MollifiedPolyline, SmoothPerturbedLine, mollify_polyline  # noqa: F401
