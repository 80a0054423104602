"""Truncated moment problems on reducible cubics y*c(x, y) = 0 of hyperbolic type."""

__version__ = "0.1.0"
