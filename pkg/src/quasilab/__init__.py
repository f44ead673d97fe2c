"""Numerical checks for weighted shifts, convolution operators on weighted
line spaces, and the symbols and measures that connect them."""

__version__ = "0.1.0"
