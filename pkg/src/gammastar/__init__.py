"""Asymptotics of the scaled gamma function with certified error bounds."""

__version__ = "0.1.0"
