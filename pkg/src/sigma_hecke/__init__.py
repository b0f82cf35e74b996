"""Exact tools for Sigma-sets of Hecke pairs and their Schlichting completions."""

__version__ = "0.1.0"
