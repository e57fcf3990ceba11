"""Gram-matrix SDP machinery: exact matrices, the interior-point solver, SDPA files."""

from .feasible import sdp_feasible, solve_max_min_eig
from .matrix import LdlFactorization, SdpProblem, SymMatrix, ldl_decompose, round_project, to_dyadic

__all__ = [
    "LdlFactorization",
    "SdpProblem",
    "SymMatrix",
    "ldl_decompose",
    "round_project",
    "sdp_feasible",
    "solve_max_min_eig",
    "to_dyadic",
]
