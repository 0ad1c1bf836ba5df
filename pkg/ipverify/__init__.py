"""Numerical verification of quadrirational independence-preserving maps."""

__version__ = "0.1.0"
