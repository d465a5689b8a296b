"""Exact quantum KdV spectra: recursion tables, fermionic oracles and eigenvalue expansions."""

__version__ = "0.1.0"
