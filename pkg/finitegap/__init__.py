"""Finite-gap Schrödinger and Dirac operators from singular rational spectral curves."""

__version__ = "1.0.0"
