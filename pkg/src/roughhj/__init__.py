"""Pathwise Hamilton-Jacobi and conservation-law solvers for rough driving signals."""

from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = ["BACKEND", "__version__"]
