"""Explicit trace-formula bounds for closed hyperbolic manifolds."""

__version__ = "0.1.0"
