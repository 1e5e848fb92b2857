"""Filtered Fourier integrators for the cubic Schroedinger equation on the torus."""

__version__ = "0.1.0"

from .integrators import SchemeId, StepParams, evolve, step
from .spectral import SpectralField, TorusGrid

__all__ = ["SchemeId", "StepParams", "SpectralField", "TorusGrid", "evolve", "step", "__version__"]
