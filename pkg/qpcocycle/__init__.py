"""Quasi-periodic cocycle Lyapunov exponent toolkit."""

__version__ = "1.0.0"
