"""Forward compression recursions, their initializers and dense oracles.

A *local problem* supplies, for each level ``i = 1..n_sub``, the type-b
system matrix ``M_i = I + K_ib`` and (when the right-hand side is singular)
samples of ``f`` on the type-b and type-c grids of that level.  The
recursions only ever need the masked matrix ``M_i^o`` (the centre block
zeroed) together with the previous compressed block, and they never invert
that block: every level is one solve against a small Schur complement.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .geometry import Grid, grid_on, level_scale, local_type_b_grid, type_b_breaks, type_c_breaks
from .linalg import SingularMatrixError, inv, kron_linear_solve, lu_solve
from .quadrature import Layout, build_P_bc, build_P_f_bc, interp_matrix, rank_one_pf_block


class RecursionError(RuntimeError):
    def __init__(self, message, level=None, residual=None):
        super().__init__(message)
        self.level = level
        self.residual = residual


# --- local problems ---------------------------------------------------------

@dataclass
class LocalProblem:
    """Per-level data source for the recursions around one singular point.

    ``system(level)`` returns the full type-b matrix ``I + K_ib``;
    ``f_b(level)`` and ``f_c(level)`` return ``f`` sampled on the type-b and
    type-c grids of that level (``None`` when there is no singular ``f``).
    """

    layout: Layout
    n_sub: int
    system: Callable
    f_b: Optional[Callable] = None
    f_c: Optional[Callable] = None


def system_matrix_type_b(kernel, grid):
    """``I + K`` on a local grid (``grid`` may be a ``Grid`` or ``LocalGrid``)."""
    g = getattr(grid, "grid", grid)
    return np.eye(len(g), dtype=complex) + kernel.matrix(g)


def type_c_grid(contour, level, n_sub, npan):
    return grid_on(contour, type_c_breaks(level_scale(level, n_sub, npan)))


def contour_local_problem(kernel, contour, npan, n_sub, rhs=None):
    """Local problem for a closed contour with its singular point at ``t = 0``."""
    def system(level):
        return system_matrix_type_b(kernel, local_type_b_grid(contour, level, n_sub, npan))

    f_b = f_c = None
    if rhs is not None:
        def f_b(level):
            return rhs.eval(local_type_b_grid(contour, level, n_sub, npan).grid)

        def f_c(level):
            return rhs.eval(type_c_grid(contour, level, n_sub, npan))

    return LocalProblem(Layout(2), n_sub, system, f_b, f_c)


# --- the inversion-free step ------------------------------------------------

def masked(M, layout):
    """``M^o``: ``M`` with its centre (star x star) block set to zero."""
    Mo = np.array(M, dtype=complex)
    s = layout.star_b
    Mo[np.ix_(s, s)] = 0
    return Mo


def schur_solve(A, Mo, Z, C, layout):
    """Solve ``(F{A^-1} + M^o) Y = [A^-1 Z ; C]`` without inverting ``A``.

    ``Z`` holds the star rows (already multiplied by ``A``), ``C`` the circ
    rows of the right-hand side.  Only the small Schur complement
    ``D - V A U`` is factorized.
    """
    s, c = layout.star_b, layout.circ_b
    U = Mo[np.ix_(s, c)]
    V = Mo[np.ix_(c, s)]
    D = Mo[np.ix_(c, c)]
    Z = np.asarray(Z, dtype=complex)
    C = np.asarray(C, dtype=complex)
    AU = A @ U
    Yc = lu_solve(D - V @ AU, C - V @ Z)
    Y = np.empty((layout.nb,) + Z.shape[1:], dtype=complex)
    Y[s] = Z - AU @ Yc
    Y[c] = Yc
    return Y


def schur_banachiewicz_step(P, PW, M, R_prev, layout=Layout(2)):
    """``P_W^T (F{R_prev^-1} + I^o + K^o)^-1 P`` using one small solve."""
    Mo = masked(M, layout)
    Y = schur_solve(R_prev, Mo, R_prev @ P[layout.star_b], P[layout.circ_b], layout)
    return PW.T @ Y


def direct_step(P, PW, M, R_prev, layout=Layout(2), max_cond=1e12):
    """The same update by explicit inversion of ``R_prev`` (oracle only)."""
    if np.linalg.cond(R_prev) > max_cond:
        raise SingularMatrixError("R_prev too ill-conditioned for direct inversion")
    Mo = masked(M, layout)
    s = layout.star_b
    Mo[np.ix_(s, s)] = inv(R_prev)
    return PW.T @ lu_solve(Mo, P)


# --- forward recursions -----------------------------------------------------

@dataclass
class LevelRecord:
    """What one level contributes to the backward recursions."""

    level: int
    Mo: np.ndarray
    R_prev: np.ndarray
    r_prev: Optional[np.ndarray] = None
    f_b: Optional[np.ndarray] = None


@dataclass
class CompressedOperators:
    """Output of the forward recursions around one singular point.

    ``R_block`` is the non-trivial block of ``R``, ``r_f_star`` the vector
    ``R_f f_coa^*`` and ``Rf_block`` the block of ``R_f`` if requested.
    ``archive[i - 1]`` holds the data of level ``i``.
    """

    layout: Layout
    n_sub: int
    R_block: np.ndarray
    R0: np.ndarray
    r_f_star: Optional[np.ndarray] = None
    r_f0: Optional[np.ndarray] = None
    Rf_block: Optional[np.ndarray] = None
    archive: list = field(default_factory=list, repr=False)


def plain_R0(M1, layout):
    s = layout.star_b
    return inv(M1[np.ix_(s, s)])


def forward_recursion(problem, R0=None, Rf0=None, with_f=True, with_Rf=False):
    """Run the R recursion, and in tandem the ``r_f^*`` (and ``R_f``) ones.

    Parameters
    ----------
    problem : LocalProblem
    R0 : array, optional
        Initializer. Defaults to the inverse of the centre block of ``M_1``.
    Rf0 : array, optional
        Initializer of ``R_f``; defaults to ``R0``.  ``r_f0 = Rf0 f_1b^*``.
    with_f : bool
        Also run the vector recursion for ``r_f^*`` (needs ``problem.f_b``).
    with_Rf : bool
        Also run the matrix recursion for ``R_f``.
    """
    lay = problem.layout
    if problem.n_sub < 1:
        raise ValueError("n_sub must be at least 1")
    with_f = with_f and problem.f_b is not None
    with_Rf = with_Rf and with_f
    P, PW = build_P_bc(lay)
    s, c = lay.star_b, lay.circ_b

    M = problem.system(1)
    if R0 is None:
        R0 = plain_R0(M, lay)
    R = np.array(R0, dtype=complex)
    Rf0 = R if Rf0 is None else np.asarray(Rf0, dtype=complex)
    Rf = Rf0
    r = r0 = None
    archive = []
    for level in range(1, problem.n_sub + 1):
        if level > 1:
            M = problem.system(level)
        Mo = masked(M, lay)
        rec = LevelRecord(level, Mo, R)
        try:
            R_new = PW.T @ schur_solve(R, Mo, R @ P[s], P[c], lay)
            if with_f:
                fb = np.asarray(problem.f_b(level), dtype=complex)
                if level == 1:
                    r = r0 = Rf0 @ fb[s]
                rec.r_prev, rec.f_b = r, fb
                r = PW.T @ schur_solve(R, Mo, r, fb[c], lay)
                if with_Rf:
                    Pf = build_P_f_bc(fb, problem.f_c(level), lay)
                    Rf = PW.T @ schur_solve(R, Mo, Rf @ Pf[s], Pf[c], lay)
        except SingularMatrixError as exc:
            raise RecursionError(f"singular Schur complement at level {level}",
                                 level=level) from exc
        archive.append(rec)
        R = R_new
    return CompressedOperators(lay, problem.n_sub, R, np.array(R0, dtype=complex),
                               r, r0, Rf if with_Rf else None, archive)


def forward_recursion_R(problem, R0=None):
    return forward_recursion(problem, R0=R0, with_f=False)


def forward_recursion_Rf(problem, R0=None, Rf0=None):
    return forward_recursion(problem, R0=R0, Rf0=Rf0, with_Rf=True).Rf_block


def forward_recursion_rf_vec(problem, R0=None, Rf0=None):
    return forward_recursion(problem, R0=R0, Rf0=Rf0).r_f_star


# --- fixed-point initializers -----------------------------------------------

def fixed_point_map(R, Mo, layout=Layout(2)):
    P, PW = build_P_bc(layout)
    return PW.T @ schur_solve(R, Mo, R @ P[layout.star_b], P[layout.circ_b], layout)


def fixed_point_R(M, layout=Layout(2), tol=1e-15, max_iter=2000, R0=None):
    """Picard iteration of the R map with a level-independent matrix ``M``.

    Starts from the plain initializer and stops when the relative Frobenius
    change drops below ``tol``.  Once the change has reached ``1e3 * tol``
    the iteration is also stopped when round-off prevents further decrease
    for 50 steps, returning the best iterate.
    """
    Mo = masked(M, layout)
    R = plain_R0(M, layout) if R0 is None else np.asarray(R0, dtype=complex)
    best = (np.inf, R, 0)
    for it in range(1, max_iter + 1):
        Rn = fixed_point_map(R, Mo, layout)
        d = np.linalg.norm(Rn - R) / np.linalg.norm(Rn)
        R = Rn
        if d <= tol:
            return R
        if d < best[0]:
            best = (d, R, it)
        elif best[0] <= 1e3 * tol and it - best[2] >= 50:
            return best[1]
    raise RecursionError(f"fixed-point iteration for R did not converge in {max_iter} steps",
                         residual=best[0])


def fixed_point_Rf_parts(R_star, M, Pf, layout=Layout(2)):
    """Affine form ``X -> A1 X A2 + D`` of the R_f map at the fixed point ``R_star``."""
    s, c = layout.star_b, layout.circ_b
    P, PW = build_P_bc(layout)
    Mo = masked(M, layout)
    n = s.size
    A1 = PW.T @ schur_solve(R_star, Mo, np.eye(n, dtype=complex),
                            np.zeros((c.size, n), dtype=complex), layout)
    A2 = Pf[s]
    D = PW.T @ schur_solve(R_star, Mo, np.zeros((n, Pf.shape[1]), dtype=complex), Pf[c], layout)
    return A1, A2, D


def fixed_point_Rf(R_star, M, f_b, f_c, layout=Layout(2), method="rank-one"):
    """Fixed point ``R_f^*`` of the affine R_f map with a level-independent ``P_fbc``.

    ``method='kron'`` solves the vectorized system directly;
    ``method='rank-one'`` (default) uses that ``A2`` is rank one, so
    ``X = D + y v^H`` with ``(I - (v^H u) A1) y = A1 D u``.
    """
    Pf = build_P_f_bc(f_b, f_c, layout)
    A1, A2, D = fixed_point_Rf_parts(R_star, M, Pf, layout)
    if method == "kron":
        return kron_linear_solve(A1, A2, D)
    if method != "rank-one":
        raise ValueError(f"unknown method {method!r}")
    s, ss = layout.star_b, layout.starstar_c
    u = np.asarray(f_b, dtype=complex)[s]
    v = np.zeros(A2.shape[1], dtype=complex)
    fc = np.asarray(f_c, dtype=complex)[ss]
    v[ss] = fc / np.vdot(fc, fc).real
    beta = np.vdot(v, u)
    y = lu_solve(np.eye(u.size) - beta * A1, A1 @ (D @ u))
    return D + np.outer(y, v.conj())


def wedge_problem_data(kernel, theta, rhs_leading=None, layout=Layout(2)):
    """Level-independent ``M`` (and leading-term samples) on an exact wedge.

    Returns ``(M, f_b, f_c)``; the f samples are ``None`` without a
    leading term.
    """
    from .geometry import wedge_contour
    wedge = wedge_contour(theta)
    gb = grid_on(wedge, type_b_breaks(1.0))
    M = system_matrix_type_b(kernel, gb)
    if rhs_leading is None:
        return M, None, None
    gc = grid_on(wedge, type_c_breaks(1.0))
    return M, np.asarray(rhs_leading(gb.t, gb.z), dtype=complex), \
        np.asarray(rhs_leading(gc.t, gc.z), dtype=complex)


def fixed_point_initializers(kernel, theta, problem, rhs_leading=None, **kw):
    """``(R_star, Rf_star)`` for use as ``R0`` and ``Rf0`` in :func:`forward_recursion`."""
    if not kernel.scale_invariant_on_wedges:
        raise ValueError("kernel is not scale invariant on wedges")
    M, fb, fc = wedge_problem_data(kernel, theta, rhs_leading, problem.layout)
    R_star = fixed_point_R(M, problem.layout, **kw)
    if fb is None:
        return R_star, R_star
    return R_star, fixed_point_Rf(R_star, M, fb, fc, problem.layout)


# --- dense oracles on the explicit fine grid --------------------------------

@dataclass
class FineStarGrid:
    """The fully refined grid on the four coarse panels around ``t = 0``."""

    breaks: np.ndarray
    grid: Grid
    parent: np.ndarray


def fine_star_breaks(npan, n_sub):
    H = 1.0 / npan
    pos = [2 * H] + [H / 2.0 ** j for j in range(n_sub + 1)]
    pos = np.array(pos[::-1])
    return np.concatenate([-pos[::-1], [0.0], pos])


def fine_star_grid(contour, npan, n_sub):
    br = fine_star_breaks(npan, n_sub)
    g = grid_on(contour, br)
    H = 1.0 / npan
    mids = (br[:-1] + br[1:]) / 2
    parent = np.floor(mids / H).astype(int) + 2
    return FineStarGrid(br, g, parent)


def dense_prolongations(fsg, npan, n=16):
    """``(P, P_W)`` from the 64 coarse Gamma* nodes to the fine Gamma* grid."""
    H = 1.0 / npan
    br = fsg.breaks
    npf = br.size - 1
    P = np.zeros((npf * n, 4 * n))
    for k in range(npf):
        p = fsg.parent[k]
        a = (p - 2) * H
        t = fsg.grid.t[k * n:(k + 1) * n]
        x = 2 * (t - a) / H - 1
        P[k * n:(k + 1) * n, p * n:(p + 1) * n] = interp_matrix(x, n)
    wc = np.tile(_ref_weights(n), 4) * H / 2
    PW = fsg.grid.w[:, None] * P / wc[None, :]
    return P.astype(complex), PW.astype(complex)


def _ref_weights(n):
    from .quadrature import gauss_legendre
    return gauss_legendre(n).weights


def dense_P_f(fsg, P, f_fin, f_coa, n=16):
    """Replace the Gamma** block of ``P`` with the rank-one f-reproducing block."""
    Pf = P.copy()
    rows = np.arange(n, P.shape[0] - n)
    cols = np.arange(n, 3 * n)
    Pf[np.ix_(rows, cols)] = rank_one_pf_block(f_coa[cols], f_fin[rows])
    return Pf


def dense_R(kernel, contour, npan, n_sub, rhs=None):
    """``R`` (and ``R_f``, ``r_f^*``) from their definitions on the fine grid."""
    from .geometry import build_coarse_mesh
    fsg = fine_star_grid(contour, npan, n_sub)
    P, PW = dense_prolongations(fsg, npan)
    A = np.eye(len(fsg.grid), dtype=complex) + kernel.matrix(fsg.grid)
    R = PW.T @ lu_solve(A, P)
    if rhs is None:
        return R, None, None
    mesh = build_coarse_mesh(contour, npan)
    sub = Grid(*(getattr(mesh.grid, a)[mesh.star_idx] for a in ("t", "w", "z", "zp", "zpp")))
    f_coa = rhs.eval(sub)
    f_fin = rhs.eval(fsg.grid)
    Pf = dense_P_f(fsg, P, f_fin, f_coa)
    Rf = PW.T @ lu_solve(A, Pf)
    return R, Rf, Rf @ f_coa
