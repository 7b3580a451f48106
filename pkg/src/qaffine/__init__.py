"""Exact computations for q-oscillator representations of quantum affine algebras."""

__version__ = "0.1.0"
