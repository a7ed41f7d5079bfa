"""Arithmetic functions, certified Dirichlet series and independence ranks."""

__version__ = "1.0.0"
