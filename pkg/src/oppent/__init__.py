"""Opportunistic entanglement distribution in quantum repeater networks."""

__version__ = "0.1.0"
