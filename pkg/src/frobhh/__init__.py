"""Exact complete cohomology of Frobenius algebras with BV structure."""

__version__ = "0.1.0"
