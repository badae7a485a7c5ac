"""Trotter error Hamiltonians as operator power series, randomized
correction sampling, and desk-scale simulation experiments."""

__version__ = "0.1.0"
