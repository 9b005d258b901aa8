"""Exact arithmetic over Z[i], cusp geometry for Hecke congruence subgroups of
SL(2,Z[i]), generalized Kloosterman sums with independent evaluation routes,
Bessel-kernel transforms, and large-sieve bound sweeps."""

from .gaussint import GaussianInt, Factorization, gcd, xgcd, factorize, residues, mod_inverse

__all__ = [
    "GaussianInt",
    "Factorization",
    "gcd",
    "xgcd",
    "factorize",
    "residues",
    "mod_inverse",
]

__version__ = "0.1.0"
