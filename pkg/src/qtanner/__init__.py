"""Quantum Tanner codes on left-right Cayley complexes: construction,
dimension, logical operators, distance estimation and search."""

from .construction import (
    CodeSpec,
    CssCode,
    base_params_lemma,
    build_base,
    build_lifted,
    dimension,
    lifted_dimension,
    make_spec,
    theorem1_dimension,
)
from .distance import DistanceEstimate, brute_force_css_distance, estimate_css_distance, verify_estimate
from .errors import IntegrityError, PreconditionError, RefusalError, SpecError
from .gf2 import BitMatrix, kernel_basis, rank, rref
from .groups import FiniteGroup, cyclic, direct_product, parse_group, quaternion8, semidirect_c4_c4
from .local_codes import LocalCode, canonical, distinct_permuted_codes, intersection_data

__version__ = "0.1.0"

__all__ = [
    "BitMatrix",
    "CodeSpec",
    "CssCode",
    "DistanceEstimate",
    "FiniteGroup",
    "IntegrityError",
    "LocalCode",
    "PreconditionError",
    "RefusalError",
    "SpecError",
    "base_params_lemma",
    "brute_force_css_distance",
    "build_base",
    "build_lifted",
    "canonical",
    "cyclic",
    "dimension",
    "direct_product",
    "distinct_permuted_codes",
    "estimate_css_distance",
    "intersection_data",
    "kernel_basis",
    "lifted_dimension",
    "make_spec",
    "parse_group",
    "quaternion8",
    "rank",
    "rref",
    "semidirect_c4_c4",
    "theorem1_dimension",
    "verify_estimate",
]
