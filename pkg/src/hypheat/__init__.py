"""Heat kernels, spectral analysis and one-loop actions on hyperbolic space."""

from ._kernels import BACKEND
from .hypgeom import DimensionParams, HalfSpacePoint, MobiusElement

__all__ = ["BACKEND", "DimensionParams", "HalfSpacePoint", "MobiusElement"]
__version__ = "0.1.0"
