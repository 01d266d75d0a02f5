"""Uniform Vietoris homology of finite metric and uniform spaces."""
__version__ = "0.1.0"
