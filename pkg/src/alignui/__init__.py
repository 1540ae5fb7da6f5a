"""Preference-guided UI control reasoning, generation, and evaluation."""

__version__ = "0.1.0"
