"""Retrieval-augmented legal consultation engine."""

__version__ = "0.1.0"
