"""Compressed coarse-grid systems, functionals and backward reconstruction."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .geometry import Grid, build_coarse_mesh, grid_on
from .linalg import gmres_solve, lu_solve
from .quadrature import build_P_bc
from .rcip import (contour_local_problem, fine_star_breaks, fixed_point_initializers,
                   forward_recursion, schur_solve)


@dataclass
class SolveResult:
    """Coarse-grid solution of the compressed system.

    ``rho_hat_coa = R v_tilde_coa + r_f^*`` is the weight-corrected density
    and ``q`` its integral against ``h`` (``h = 1`` by default).
    """

    v_tilde_coa: np.ndarray
    rho_hat_coa: np.ndarray
    q: complex
    gmres_iters: int = 0


@dataclass
class FineSolution:
    """Reconstructed density on the fine grid of Gamma*.

    ``weight_corrected`` flags the nodes of the four innermost panels,
    whose values are weight-corrected rather than pointwise.
    """

    grid: Grid
    v_fin: np.ndarray
    g_fin: np.ndarray
    weight_corrected: np.ndarray

    @property
    def rho_fin(self):
        return self.v_fin + self.g_fin


@dataclass
class CompressedSystem:
    matrix: np.ndarray
    rhs: np.ndarray

    def apply(self, x):
        return self.matrix @ x


def embed(block, idx, n, identity=True):
    """Global matrix equal to ``block`` on ``idx x idx`` and identity (or zero) elsewhere."""
    out = np.eye(n, dtype=complex) if identity else np.zeros((n, n), dtype=complex)
    out[np.ix_(idx, idx)] = block
    return out


def circ_matrix(K, star_idx):
    Ko = np.array(K, dtype=complex)
    Ko[np.ix_(star_idx, star_idx)] = 0
    return Ko


def assemble_compressed(K_coa, star_idx, R_block, f_coa, r_f_star=None):
    """``(I + K^o R) v = f^o - K^o r_f^*`` on the coarse grid.

    Without ``r_f_star`` this is the smooth-f system ``(I + K^o R) v = f``.
    """
    n = K_coa.shape[0]
    Ko = circ_matrix(K_coa, star_idx)
    A = np.eye(n, dtype=complex) + Ko @ embed(R_block, star_idx, n)
    f = np.array(f_coa, dtype=complex)
    if r_f_star is None:
        return CompressedSystem(A, f)
    f[star_idx] = 0
    rf = np.zeros(n, dtype=complex)
    rf[star_idx] = r_f_star
    return CompressedSystem(A, f - Ko @ rf)


def solve_system(system, method="dense", tol=np.finfo(float).eps):
    if method == "dense":
        return lu_solve(system.matrix, system.rhs).ravel(), 0
    if method == "gmres":
        res = gmres_solve(system.apply, system.rhs, tol=tol)
        return res.x, res.iters
    raise ValueError(f"unknown method {method!r}")


def weight_corrected(v, star_idx, R_block, r_f_star=None):
    rho = np.array(v, dtype=complex)
    rho[star_idx] = R_block @ v[star_idx]
    if r_f_star is not None:
        rho[star_idx] += r_f_star
    return rho


def functional_q(grid, rho_hat, h=None):
    """``sum h rho_hat |z'| w`` over the grid."""
    hv = 1.0 if h is None else h(grid.z)
    return complex(np.sum(hv * rho_hat * grid.awzp))


# --- backward recursions ----------------------------------------------------

def _reconstruct(ops, start, singular):
    lay = ops.layout
    if len(ops.archive) != ops.n_sub:
        raise ValueError("archive does not match n_sub")
    P, _ = build_P_bc(lay)
    s, c = lay.star_b, lay.circ_b
    Ic = np.zeros((lay.nb, lay.nb))
    Ic[c, c] = 1.0
    n = lay.n
    x = np.asarray(start, dtype=complex)
    outer = []
    for rec in reversed(ops.archive):
        Px = P @ x
        Y = schur_solve(rec.R_prev, rec.Mo, rec.R_prev @ Px[s], Px[c], lay)
        if singular:
            Y = Y + schur_solve(rec.R_prev, rec.Mo, rec.r_prev, rec.f_b[c], lay)
        smo = Px - (rec.Mo - Ic) @ Y
        full = smo + rec.f_b if singular else smo
        outer.append(full[c])
        x = smo[s]
    inner = ops.R0 @ x
    if singular:
        inner = inner + ops.r_f0
    # circ rows are (negative side, positive side) in each level's b-grid
    if lay.sides == 2:
        neg = [o[:n] for o in outer]
        pos = [o[n:] for o in outer[::-1]]
        return np.concatenate(neg + [inner] + pos)
    return np.concatenate([inner] + [o for o in outer[::-1]])


def backward_recursion_v(ops, v_star):
    """Fine-grid values of ``v`` on Gamma*, in increasing parameter order."""
    return _reconstruct(ops, v_star, singular=False)


def backward_recursion_g(ops):
    """Fine-grid values of ``g`` on Gamma*, in increasing parameter order."""
    if ops.r_f_star is None:
        raise ValueError("operators were computed without a right-hand side")
    return _reconstruct(ops, np.zeros(ops.layout.nc, dtype=complex), singular=True)


# --- Laplace driver ---------------------------------------------------------

@dataclass
class LaplaceRun:
    mesh: object
    ops: object
    result: SolveResult
    fine: Optional[FineSolution] = None
    q_fin: Optional[complex] = None


def solve_laplace(contour, kernel, rhs, npan=10, n_sub=60, initializer="plain",
                  method="dense", reconstruct=False):
    """Full pipeline for one singular point at ``t = 0`` of a closed contour."""
    mesh = build_coarse_mesh(contour, npan)
    problem = contour_local_problem(kernel, contour, npan, n_sub, rhs)
    if initializer == "plain":
        R0 = Rf0 = None
    elif initializer == "fixed-point":
        R0, Rf0 = fixed_point_initializers(kernel, contour.corner_angle, problem, rhs.leading)
    else:
        raise ValueError(f"unknown initializer {initializer!r}")
    ops = forward_recursion(problem, R0=R0, Rf0=Rf0)
    K = kernel.matrix(mesh.grid)
    f = rhs.eval(mesh.grid)
    sys_ = assemble_compressed(K, mesh.star_idx, ops.R_block, f, ops.r_f_star)
    v, iters = solve_system(sys_, method)
    rho_hat = weight_corrected(v, mesh.star_idx, ops.R_block, ops.r_f_star)
    result = SolveResult(v, rho_hat, functional_q(mesh.grid, rho_hat), iters)
    run = LaplaceRun(mesh, ops, result)
    if reconstruct:
        fg = grid_on(contour, fine_star_breaks(npan, n_sub))
        vf = backward_recursion_v(ops, v[mesh.star_idx])
        gf = backward_recursion_g(ops)
        flags = np.zeros(len(fg), dtype=bool)
        mid = len(fg) // 2
        flags[mid - 2 * 16:mid + 2 * 16] = True
        run.fine = FineSolution(fg, vf, gf, flags)
        outside = np.setdiff1d(np.arange(mesh.n), mesh.star_idx)
        run.q_fin = complex(np.sum(v[outside] * mesh.grid.awzp[outside])
                            + np.sum(run.fine.rho_fin * fg.awzp))
    return run
