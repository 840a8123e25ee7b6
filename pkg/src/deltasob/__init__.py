"""Rearrangement inequalities for Green potentials of L1 data on balls."""

__version__ = "0.1.0"
