"""Milnor-Witt A1-cellular chain complexes of smooth toric varieties."""

__version__ = "0.1.0"
