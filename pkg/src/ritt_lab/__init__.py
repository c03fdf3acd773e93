"""Convolution powers of probabilities on the nonnegative integers, Ritt/Kreiss diagnostics and fractional operator calculus."""

__version__ = "0.1.0"
