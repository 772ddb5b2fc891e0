"""Exact obstructions to satellite patterns inducing concordance homomorphisms."""

__version__ = "0.1.0"
