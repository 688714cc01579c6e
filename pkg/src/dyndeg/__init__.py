"""Exact dynamical degrees of polynomial automorphisms of affine space."""

from .polyring import GF, QQ, FieldSpec, ParseError, Polynomial, PolynomialError
from .automorphism import (Automorphism, BudgetExceeded, PermTriForm, PolyMap, compose,
                           degree_sequence, dyndeg_estimate, iterate, line_degree_sequence,
                           make_affine, make_permutation, make_triangular, parse_map)
from .algebraic import AlgebraicNumber, NumberField
from .weights import maximal_eigenvalue, maximal_eigenvector, stability_verdict
from .projection import find_linear_projections, lambda_engine
from .classify4 import ClassificationTrace, classify, random_affine_triangular, verify_trace
from . import families

__version__ = "0.1.0"

__all__ = [
    "GF", "QQ", "FieldSpec", "ParseError", "Polynomial", "PolynomialError",
    "Automorphism", "BudgetExceeded", "PermTriForm", "PolyMap", "compose", "degree_sequence",
    "dyndeg_estimate", "iterate", "line_degree_sequence", "make_affine", "make_permutation",
    "make_triangular", "parse_map", "AlgebraicNumber", "NumberField", "maximal_eigenvalue",
    "maximal_eigenvector", "stability_verdict", "find_linear_projections", "lambda_engine",
    "ClassificationTrace", "classify", "random_affine_triangular", "verify_trace", "families",
]
