"""Divergence-free solvers and diagnostics for the 2D induction equation."""

__version__ = "0.1.0"
