"""Distortion certificates, word metrics, rotation invariants, curve growth and spread."""

__version__ = "0.1.0"
