"""Operator calculus on Heisenberg, AHW, Dynin and SU(1,1) groups."""

__version__ = "0.1.0"
