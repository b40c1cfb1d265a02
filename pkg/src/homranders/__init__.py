"""Berwald and Ricci-quadratic classification of homogeneous Randers spaces."""

__version__ = "0.1.0"
