"""Hyperboloidal-slice energy toolkit for coupled wave/Klein-Gordon systems."""

__version__ = "0.1.0"
