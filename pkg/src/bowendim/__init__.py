"""Thermodynamic formalism and dimension tools for symbolic linear horseshoes."""

__version__ = "0.1.0"
