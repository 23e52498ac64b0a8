"""Dirichlet eigenvalues of geodesic balls in spherically symmetric manifolds."""
__version__ = "0.1.0"
