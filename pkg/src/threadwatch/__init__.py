"""Malicious-URL campaign analysis over discussion-thread corpora."""

__version__ = "0.1.0"
