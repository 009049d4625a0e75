"""Exact correlation-inequality laboratory for monotone functions on {0,1}^n."""

from .cube import FunctionTable, Spectrum

__version__ = "0.1.0"
__all__ = ["FunctionTable", "Spectrum"]
