"""Solenoid groups from trees: Mekler arithmetic, path spaces and inverse systems."""

__version__ = "0.1.0"
