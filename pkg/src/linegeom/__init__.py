"""Hessian-metric geometry of transmission-line components."""

__version__ = "0.1.0"
