"""Entanglement detection and distillability toolkit."""

__version__ = "0.1.0"
