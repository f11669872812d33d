"""Fibre products of graph immersions, long cycles and DFA intersection."""

__version__ = "0.1.0"
