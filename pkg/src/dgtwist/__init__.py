"""Exact dg categories, twisted tensor products of intervals and the 2-operad complexes built from them."""

__version__ = "0.1.0"
