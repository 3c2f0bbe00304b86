"""Secrecy performance of a HAPS-relayed FSO/RF satellite downlink."""

__version__ = "0.1.0"
