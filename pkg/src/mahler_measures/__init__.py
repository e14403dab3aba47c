"""Exact linear independence measures for pairs of Mahler functions."""

__version__ = "0.1.0"
