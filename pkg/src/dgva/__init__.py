"""Exact computations with truncated dg vertex algebras."""
__version__ = "0.1.0"
