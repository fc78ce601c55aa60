"""Recursively compressed inverse preconditioning for integral equations with singular data."""

from .geometry import build_coarse_mesh, contour_one_corner, local_type_b_grid
from .linalg import GmresError, SingularMatrixError, gmres_solve, kron_linear_solve, lu_solve
from .models import (circle_exact_q, circle_exact_rho, laplace_dlp_kernel, rhs_circle,
                     rhs_one_corner)
from .rcip import (contour_local_problem, fixed_point_R, fixed_point_Rf, forward_recursion,
                   schur_banachiewicz_step)
from .solver import SolveResult, solve_laplace

__version__ = "0.1.0"

__all__ = [
    "GmresError",
    "SingularMatrixError",
    "SolveResult",
    "build_coarse_mesh",
    "circle_exact_q",
    "circle_exact_rho",
    "contour_local_problem",
    "contour_one_corner",
    "fixed_point_R",
    "fixed_point_Rf",
    "forward_recursion",
    "gmres_solve",
    "kron_linear_solve",
    "laplace_dlp_kernel",
    "local_type_b_grid",
    "lu_solve",
    "rhs_circle",
    "rhs_one_corner",
    "schur_banachiewicz_step",
    "solve_laplace",
]
