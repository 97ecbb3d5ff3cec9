"""Quasi-stationary model of pulsed multimode parametric down-conversion."""
__version__ = "0.1.0"
