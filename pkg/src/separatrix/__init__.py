"""Separating solutions of a quadratic recurrent equation with polynomial kernels."""

__version__ = "0.1.0"
