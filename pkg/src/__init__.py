"""Genuine tripartite entanglement detection with trace-norm criteria."""

__version__ = "0.1.0"
