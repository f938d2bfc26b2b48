"""Kernels, limit kernels and Monte Carlo checks for elliptic Ginibre ensembles."""

__version__ = "0.1.0"
