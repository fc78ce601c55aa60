"""Dense complex linear algebra used by the recursions and solvers.

Matrices are plain ``numpy`` arrays of dtype ``complex128`` in C (row-major)
order.  Everything here is a pure function of its inputs.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg


class SingularMatrixError(np.linalg.LinAlgError):
    """Raised when a pivot or intermediate matrix is singular to working precision."""

    def __init__(self, message, pivot=None):
        super().__init__(message)
        self.pivot = pivot


class GmresError(RuntimeError):
    """GMRES hit ``max_iter`` without reaching the tolerance or stagnating."""

    def __init__(self, message, best_residual):
        super().__init__(message)
        self.best_residual = best_residual


def as_cmatrix(a):
    a = np.asarray(a, dtype=complex)
    if a.ndim == 1:
        a = a[:, None]
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def lu_solve(A, B):
    """Solve ``A X = B`` by LU with partial pivoting.

    Raises
    ------
    SingularMatrixError
        If the smallest pivot is zero or below ``eps`` relative to the
        largest one.  The offending pivot magnitude is attached.
    """
    A = np.asarray(A, dtype=complex)
    B = np.asarray(B, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"A must be square, got shape {A.shape}")
    with warnings.catch_warnings():
        # singular pivots are reported below with their magnitude
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(A, check_finite=True)
    d = np.abs(np.diag(lu))
    pmin, pmax = d.min(), d.max()
    if pmax == 0.0 or pmin <= np.finfo(float).eps * pmax:
        raise SingularMatrixError(f"singular pivot |u_kk| = {pmin:.3e}", pivot=pmin)
    X = scipy.linalg.lu_solve((lu, piv), B)
    if not np.all(np.isfinite(X)):
        raise SingularMatrixError("non-finite solution", pivot=pmin)
    return X


def inv(A):
    A = np.asarray(A, dtype=complex)
    return lu_solve(A, np.eye(A.shape[0], dtype=complex))


@dataclass
class GmresResult:
    x: np.ndarray
    iters: int
    residual_history: list
    stagnated: bool = False


def gmres_solve(apply, b, tol=np.finfo(float).eps, max_iter=None,
                stagnation_window=5, stagnation_factor=1e-3):
    """Unrestarted GMRES with modified Gram-Schmidt and one reorthogonalization.

    Parameters
    ----------
    apply : callable
        ``apply(x)`` returns ``A @ x``.
    b : array
        Right-hand side, must be nonzero.
    tol : float
        Target for the estimated relative residual ``|r_k| / |b|``.
    max_iter : int, optional
        Defaults to ``len(b)``.

    Returns
    -------
    GmresResult
        ``iters`` is the number of Krylov vectors used.  If the estimated
        residual fails to drop by ``1 - stagnation_factor`` over
        ``stagnation_window`` consecutive steps, the best iterate so far is
        returned with ``stagnated=True``.
    """
    b = np.asarray(b, dtype=complex)
    n = b.size
    if max_iter is None:
        max_iter = n
    bnorm = np.linalg.norm(b)
    if bnorm == 0.0:
        raise ValueError("right-hand side is zero")

    V = np.zeros((n, max_iter + 1), dtype=complex)
    H = np.zeros((max_iter + 1, max_iter), dtype=complex)
    cs = np.zeros(max_iter, dtype=complex)
    sn = np.zeros(max_iter, dtype=complex)
    g = np.zeros(max_iter + 1, dtype=complex)
    g[0] = bnorm
    V[:, 0] = b / bnorm
    history = [1.0]
    best = (1.0, 0)

    def iterate(k):
        y = scipy.linalg.solve_triangular(H[:k, :k], g[:k])
        return V[:, :k] @ y

    for j in range(max_iter):
        w = np.asarray(apply(V[:, j]), dtype=complex)
        for _ in range(2):
            for i in range(j + 1):
                hij = np.vdot(V[:, i], w)
                H[i, j] += hij
                w = w - hij * V[:, i]
        H[j + 1, j] = np.linalg.norm(w)
        breakdown = H[j + 1, j] == 0.0
        if not breakdown:
            V[:, j + 1] = w / H[j + 1, j]
        for i in range(j):
            t = cs[i] * H[i, j] + sn[i] * H[i + 1, j]
            H[i + 1, j] = -np.conj(sn[i]) * H[i, j] + cs[i] * H[i + 1, j]
            H[i, j] = t
        a, c = H[j, j], H[j + 1, j]
        r = np.hypot(abs(a), abs(c))
        cs[j] = abs(a) / r if r else 1.0
        sn[j] = (a / abs(a)) * np.conj(c) / r if abs(a) else 1.0
        H[j, j] = cs[j] * a + sn[j] * c
        H[j + 1, j] = 0.0
        g[j + 1] = -np.conj(sn[j]) * g[j]
        g[j] = cs[j] * g[j]
        res = abs(g[j + 1]) / bnorm
        history.append(res)
        if res < best[0]:
            best = (res, j + 1)
        if res <= tol or breakdown:
            return GmresResult(iterate(j + 1), j + 1, history)
        if j + 1 > stagnation_window:
            old = history[-1 - stagnation_window]
            if min(history[-stagnation_window:]) > (1 - stagnation_factor) * old:
                k = best[1]
                return GmresResult(iterate(k), j + 1, history, stagnated=True)
    raise GmresError(
        f"GMRES reached max_iter={max_iter} with residual {best[0]:.3e}", best[0])


def kron_linear_solve(C1, C2, D):
    """Solve ``X = C1 @ X @ C2 + D`` by vectorizing into one dense system.

    Uses ``vec(C1 X C2) = (C2^T kron C1) vec(X)`` with column-stacking vec.
    """
    C1 = np.asarray(C1, dtype=complex)
    C2 = np.asarray(C2, dtype=complex)
    D = np.asarray(D, dtype=complex)
    m, n = D.shape
    if C1.shape != (m, m) or C2.shape != (n, n):
        raise ValueError("incompatible shapes")
    op = np.eye(m * n, dtype=complex) - np.kron(C2.T, C1)
    x = lu_solve(op, D.reshape(-1, order="F"))
    return x.reshape((m, n), order="F")


def lemma_lhs(U, A, V, B):
    """``U (A + V B U)^-1 V``."""
    return U @ lu_solve(A + V @ B @ U, V)


def lemma_rhs(U, A, V, B):
    """``((U A^-1 V)^-1 + B)^-1``."""
    S = U @ lu_solve(A, V)
    return inv(inv(S) + B)


def lemma2_lhs(U, A, V, B):
    """``U (A + V B U)^-1``."""
    M = A + V @ B @ U
    return lu_solve(M.T, U.T).T


def lemma2_rhs(U, A, V, B):
    """``((U A^-1 V)^-1 + B)^-1 (U A^-1 V)^-1 U A^-1``."""
    UAi = lu_solve(A.T, U.T).T
    Si = inv(UAi @ V)
    return inv(Si + B) @ Si @ UAi
