"""Harmonic-oscillator reductions of one-dimensional Hamiltonians."""

__version__ = "0.1.0"
