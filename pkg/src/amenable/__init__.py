"""Exact computations around amenability of noncommutative algebras."""

__version__ = "0.1.0"
