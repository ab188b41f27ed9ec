"""Exact construction of a Frobenius structure with logarithmic prepotential
on the orbit space of the hyperoctahedral group B_n, with mechanical
verification of every step."""

__version__ = "0.1.0"
