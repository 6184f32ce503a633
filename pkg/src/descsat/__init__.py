"""Descriptor algebra for 3-CNF satisfiability."""

__version__ = "0.1.0"
