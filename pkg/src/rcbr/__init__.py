"""Exact epistemic game theory: iterated elimination, belief hierarchies and
the justification game for finite two-player games."""

__version__ = "0.1.0"
