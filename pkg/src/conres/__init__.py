"""Resonance-free regions for conic and delta-potential scattering."""
from .errors import ConresError, InputError, NumericalError

__version__ = "0.1.0"

__all__ = ["ConresError", "InputError", "NumericalError", "__version__"]
