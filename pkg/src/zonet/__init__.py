"""Exact multistationarity analysis for small zero-one mass-action networks."""

__version__ = "0.1.0"
