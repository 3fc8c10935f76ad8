"""Exact Kloosterman sums in characteristics 2 and 3 and the L-functions built from them."""

__version__ = "0.1.0"
