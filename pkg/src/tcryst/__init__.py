"""Twisted crystallographic T-duality toolkit."""

__version__ = "0.1.0"
