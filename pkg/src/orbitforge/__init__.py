"""Modular spacecraft GN&C simulation: kernel, messages, dynamics, flight software."""

__version__ = "0.1.0"
