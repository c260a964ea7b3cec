"""Dual cube complexes of finite halfspace systems, with exact planar models."""
from . import kernels
from .errors import DualCubeError

__version__ = "0.1.0"
__all__ = ["DualCubeError", "kernels", "__version__"]
