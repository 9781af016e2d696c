"""Euler transforms of products of two regularized incomplete beta functions."""

__version__ = "0.1.0"
