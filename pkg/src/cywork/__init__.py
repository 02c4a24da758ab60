"""Exact computations around Calabi-Yau algebras: superpotentials, loop homology and tilings."""

__version__ = "0.1.0"
