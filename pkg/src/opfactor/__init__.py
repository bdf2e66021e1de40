"""Finite-dimensional checks of factorisation results for operators.

Null spaces of products, center-valued dimension in direct sums of matrix
algebras, commutativity versus stability of projections, constant-coefficient
ODEs solved by factoring, and FFT-discretised differentiation on a circle.
"""
from .errors import HypothesisError
from .numkernel import householder_qr, hermitian_eig, svd

__all__ = ["HypothesisError", "householder_qr", "hermitian_eig", "svd"]
__version__ = "0.1.0"
