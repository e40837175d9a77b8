"""Entanglement dynamics of photon pairs with one photon in a noisy channel."""

__version__ = "0.1.0"
