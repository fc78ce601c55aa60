"""Linearized BGKW Couette flow: Abramowitz functions, upsampled assembly, solver."""

from .abramowitz import abramowitz_j, j_minus1_split
from .couette import BgkwProblem, CouetteResult, condition_number, solve_couette
from .upsampling import SubdivisionError, kernel_matrix, panel_weights

__all__ = [
    "BgkwProblem",
    "CouetteResult",
    "SubdivisionError",
    "abramowitz_j",
    "condition_number",
    "j_minus1_split",
    "kernel_matrix",
    "panel_weights",
    "solve_couette",
]
