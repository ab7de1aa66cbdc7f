"""Exact deformation theory of finite-dimensional hom-Lie-Rinehart algebras.

Everything is computed over the rationals from structure constants: the graded
Lie algebra of (phi, beta)-multiderivations, the deformation complex built on
it, and the order-by-order formal deformation / obstruction machinery.
"""

from homdef.linalg import Q, SubspaceBasis, nullspace_basis, rank, solve
from homdef.algebra import (
    AlgebraSpec,
    ModuleSpec,
    ValidationReport,
    phi_derivations_basis,
    validate_algebra,
    validate_module,
)
from homdef.hlr import HLRModule, HLRStructure, validate_hlr
from homdef.mder import Multiderivation, bracket, circ, mder_space
from homdef.complex import cohomology, delta
from homdef.deform import DeformationJet, check_jet, extend, obstruction

__all__ = [
    "Q",
    "SubspaceBasis",
    "nullspace_basis",
    "rank",
    "solve",
    "AlgebraSpec",
    "ModuleSpec",
    "ValidationReport",
    "phi_derivations_basis",
    "validate_algebra",
    "validate_module",
    "HLRModule",
    "HLRStructure",
    "validate_hlr",
    "Multiderivation",
    "bracket",
    "circ",
    "mder_space",
    "cohomology",
    "delta",
    "DeformationJet",
    "check_jet",
    "extend",
    "obstruction",
]
