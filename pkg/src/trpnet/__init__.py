"""Collective UV emission of tryptophan networks in microtubule architectures."""

__version__ = "0.1.0"
