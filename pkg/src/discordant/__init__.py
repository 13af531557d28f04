"""Quantum discord of two-qubit X-states from the geometry of the correlation ellipsoid."""
__version__ = "0.1.0"
