"""Symbolic dynamics, suspension flows and periodic-orbit census on affine horseshoes."""
__version__ = "0.1.0"
