"""Spin-system laboratory: exact diagonalization, Bethe ansatz, toric code."""

__version__ = "0.1.0"
