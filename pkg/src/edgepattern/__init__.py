"""Generalized edge patterns for n x n pixel-matrix folding."""

__version__ = "0.1.0"
