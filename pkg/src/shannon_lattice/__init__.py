"""Subgroup independent sets in powers of fraction graphs, via p-ary lattices."""

__version__ = "0.1.0"

from .construction import ConstructionParams, derive, verify_family, verify_perturbation
from .exact import Matrix, det, is_p0
from .graphs import FractionGraphPower, build_quotient, lift_bound
from .lattice import PAryLattice, certify, lambda_inf
from .mis import solve

__all__ = [
    "ConstructionParams",
    "FractionGraphPower",
    "Matrix",
    "PAryLattice",
    "build_quotient",
    "certify",
    "derive",
    "det",
    "is_p0",
    "lambda_inf",
    "lift_bound",
    "solve",
    "verify_family",
    "verify_perturbation",
]
