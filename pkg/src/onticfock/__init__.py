"""Ontic states and beables of free QFTs on truncated Fock spaces."""

__version__ = "0.1.0"
