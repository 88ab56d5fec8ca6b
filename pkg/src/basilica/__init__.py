"""Finite-level models of the arithmetic basilica group of z^2 - 1."""

__version__ = "0.1.0"
