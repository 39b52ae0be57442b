"""Canonical traces, residues and zeta coefficients of symbols on the torus."""

__version__ = "0.1.0"
