"""Exact Lie algebra cohomology with coefficients, gluing and homotopy-invariance checks."""

from .ce import CEComplex, build_ce_complex, cohomology, pullback_cochain_map
from .complexes import ChainMap, CohomologyResult, GenericComplex, complex_cohomology
from .liealg import (
    LieAlgebra,
    LieMorphism,
    Representation,
    abelian,
    adjoint_rep,
    heisenberg3,
    sl2,
    so3,
    trivial_rep,
)

__all__ = [
    "CEComplex", "build_ce_complex", "cohomology", "pullback_cochain_map",
    "ChainMap", "CohomologyResult", "GenericComplex", "complex_cohomology",
    "LieAlgebra", "LieMorphism", "Representation",
    "abelian", "adjoint_rep", "heisenberg3", "sl2", "so3", "trivial_rep",
]
