"""Finite-dimensional matrix *-algebras: closure, spectral projections, block structure, GNS."""

from .errors import FinstarError
from .numkit import hermitian_eig, hs_inner, orthonormalize, polar
from .projections import is_minimal, is_projection, leq, minimal_decomposition, unit_decomposition
from .spectral import chain_element, cstar_dimension_identity, lagrange_projector, spectral_decompose
from .star_algebra import State, StarAlgebra, contains, generate, gns, unit
from .structure import block_structure, hom_dim, is_abelian, matrix_units, theorem_report, to_blocks

__version__ = "0.1.0"

__all__ = [
    "FinstarError",
    "State",
    "StarAlgebra",
    "block_structure",
    "chain_element",
    "contains",
    "cstar_dimension_identity",
    "generate",
    "gns",
    "hermitian_eig",
    "hom_dim",
    "hs_inner",
    "is_abelian",
    "is_minimal",
    "is_projection",
    "lagrange_projector",
    "leq",
    "matrix_units",
    "minimal_decomposition",
    "orthonormalize",
    "polar",
    "spectral_decompose",
    "theorem_report",
    "to_blocks",
    "unit",
    "unit_decomposition",
]
