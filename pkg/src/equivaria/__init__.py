"""Computational operator algebra at finite scale.

Finite groups and their representations, matrix *-algebras, equivariant
systems, crossed products, fixed-point algebras, spectrum classification,
Hilbert C*-modules, and Morita-equivalence verification.
"""

__version__ = "0.1.0"
