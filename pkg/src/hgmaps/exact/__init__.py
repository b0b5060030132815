"""Exact Gaussian-rational algebra used by the projective-line backend."""

from .matrices import ExactMatrix, exact_kernel, exact_rank
from .polynomials import (
    Polynomial,
    PrincipalPart,
    RationalFunction,
    partial_fractions,
    poly_derivative,
    polynomial,
    residue,
)
from .scalars import (
    ONE,
    ZERO,
    GaussianRational,
    format_gaussian,
    gaussian,
    parse_complex,
    parse_gaussian,
    ratio,
    to_complex,
)

__all__ = [
    "ExactMatrix",
    "GaussianRational",
    "ONE",
    "Polynomial",
    "PrincipalPart",
    "RationalFunction",
    "ZERO",
    "exact_kernel",
    "exact_rank",
    "format_gaussian",
    "gaussian",
    "parse_complex",
    "parse_gaussian",
    "partial_fractions",
    "poly_derivative",
    "polynomial",
    "ratio",
    "residue",
    "to_complex",
]
