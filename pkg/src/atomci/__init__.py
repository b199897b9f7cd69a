"""Symmetry-adapted configuration interaction for atoms over Slater-type orbitals."""

__version__ = "0.1.0"
