"""Arithmetic of supersingular reductions of CM elliptic curves."""

__version__ = "0.1.0"
