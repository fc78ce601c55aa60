"""Linearized BGKW Couette flow on the open arc ``[-1/2, 1/2]``.

The equation ``u - K u = f`` is solved with the singular right-hand-side
machinery on four coarse panels.  Each endpoint is a one-sided singular
point whose two nearest panels form its Gamma* region, so the two regions
cover the whole interval and ``f^o = 0``.  Local quantities near an
endpoint are written in the distance ``t`` from that endpoint, which keeps
arguments of ``J_n`` free of cancellation.

The problem is odd in ``x``: in local coordinates the right endpoint sees
exactly the negative of the left endpoint's data, so the recursions run
once and the right-hand quantities are obtained by a sign change.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..geometry import panel_nodes
from ..linalg import gmres_solve, lu_solve
from ..quadrature import NGL, Layout
from ..rcip import LocalProblem, forward_recursion
from ..solver import backward_recursion_g, backward_recursion_v
from .abramowitz import abramowitz_j
from .upsampling import kernel_matrix, make_plan

REGULARIZE_BELOW = 0.3
SQRT_PI = np.sqrt(np.pi)


@dataclass
class BgkwProblem:
    """``k``: Knudsen number; ``regularized`` defaults to ``k <= 0.3``."""

    k: float
    npan: int = 4
    n_sub: int = 41
    regularized: Optional[bool] = None
    method: str = "gmres"

    def __post_init__(self):
        if not self.k > 0:
            raise ValueError("k must be positive")
        if self.npan != 4:
            raise ValueError("the endpoint regions need exactly four coarse panels")
        if self.regularized is None:
            self.regularized = self.k <= REGULARIZE_BELOW


@dataclass
class CouetteResult:
    k: float
    u_coarse: np.ndarray
    x_coarse: np.ndarray
    u_at_half: float
    Q: float
    iters: int
    P_xy: Optional[float] = None
    cpu_seconds: float = 0.0
    extras: dict = field(default_factory=dict, repr=False)


def rhs_local(t, k, regularized):
    """Right-hand side at distance ``t`` from the left endpoint.

    Direct route: ``f = (J_0((1-t)/k) - J_0(t/k)) / (2 sqrt(pi))``.
    Regularized route (for ``w = u - x``):
    ``h = -(k/sqrt(pi)) (J_1((1-t)/k) - J_1(t/k))``.
    """
    t = np.asarray(t, dtype=float)
    if regularized:
        return -(k / SQRT_PI) * (abramowitz_j(1, (1 - t) / k) - abramowitz_j(1, t / k))
    return (abramowitz_j(0, (1 - t) / k) - abramowitz_j(0, t / k)) / (2 * SQRT_PI)


def local_breaks_b(h):
    return np.array([0.0, 0.5, 1.0, 2.0]) * h


def local_breaks_c(h):
    return np.array([0.0, 1.0, 2.0]) * h


def bgkw_local_problem(k, n_sub, H=0.25, regularized=False):
    """Local problem at the left endpoint in the distance-to-endpoint coordinate.

    Level ``i`` has scale ``h = H / 2^(n_sub - i)``; its matrices are built
    on the unit-scale grid with the rescaled Knudsen number ``k/h``.
    """
    lay = Layout(1)
    ref_t, _ = panel_nodes(local_breaks_b(1.0))
    ref_b = local_breaks_b(1.0)

    def scale(level):
        return H / 2.0 ** (n_sub - level)

    def system(level):
        kk = k / scale(level)
        return np.eye(lay.nb) - kernel_matrix(ref_t, ref_b, kk)

    def f_b(level):
        h = scale(level)
        return rhs_local(panel_nodes(local_breaks_b(h))[0], k, regularized).astype(complex)

    def f_c(level):
        h = scale(level)
        return rhs_local(panel_nodes(local_breaks_c(h))[0], k, regularized).astype(complex)

    return LocalProblem(lay, n_sub, system, f_b, f_c)


def coarse_index(npan=4, n=NGL):
    """Coarse node indices of the two Gamma* regions in local (distance) order."""
    left = np.arange(0, 2 * n)
    right = np.concatenate([np.arange(4 * n - 1, 3 * n - 1, -1), np.arange(3 * n - 1, 2 * n - 1, -1)])
    return left, right


def fine_local_breaks(n_sub, H=0.25):
    """Breakpoints of the fine grid on one Gamma* region, from the endpoint out."""
    h1 = H / 2.0 ** (n_sub - 1)
    return np.concatenate([[0.0, h1 / 2], h1 * 2.0 ** np.arange(n_sub + 1)])


def solve_couette(prob, reconstruct=True):
    """Solve one Couette problem and extract ``u(0.5)`` and ``Q``.

    ``u(0.5)`` is evaluated from the equation itself at the endpoint,
    ``u(1/2) = f(1/2) + (K u)(1/2)``, integrating against the density
    reconstructed on the fine grid of the right endpoint region.
    """
    t0 = time.process_time()
    k, n = prob.k, NGL
    H = 1.0 / prob.npan
    breaks = np.linspace(-0.5, 0.5, prob.npan + 1)
    x, wx = panel_nodes(breaks)
    left, right = coarse_index(prob.npan)

    problem = bgkw_local_problem(k, prob.n_sub, H, prob.regularized)
    ops = forward_recursion(problem)
    R, rf = ops.R_block, ops.r_f_star

    # coupling between the two regions (star-star blocks belong to R)
    Kfull = -kernel_matrix(x, breaks, k)
    order = np.concatenate([left, right])
    Ko = Kfull[np.ix_(order, order)]
    m = left.size
    Ko[:m, :m] = 0
    Ko[m:, m:] = 0
    Rg = np.zeros((2 * m, 2 * m), dtype=complex)
    Rg[:m, :m] = R
    Rg[m:, m:] = R
    rfg = np.concatenate([rf, -rf])
    A = np.eye(2 * m) + Ko @ Rg
    b = -Ko @ rfg
    if prob.method == "gmres":
        sol = gmres_solve(lambda v: A @ v, b)
        v, iters = sol.x, sol.iters
    else:
        v, iters = lu_solve(A, b).ravel(), 0
    rho_hat = Rg @ v + rfg

    u = np.empty(4 * n)
    u[order] = rho_hat.real
    # right region: Q = int_0^{1/2} u dx from the weight-corrected density
    Q = float(np.dot(rho_hat[m:].real, wx[right]))
    if prob.regularized:
        Q += 0.125

    u_half = _endpoint_value(prob, ops, v[m:], rho_hat[:m], x[left], breaks, H)
    if prob.regularized:
        u_half += 0.5
        u = u + x
    out = CouetteResult(k, u, x, u_half, Q, iters, cpu_seconds=time.process_time() - t0)
    out.extras.update(R=R, r_f_star=rf, system=A, rho_hat=rho_hat, ops=ops)
    return out


def _endpoint_value(prob, ops, v_right, rho_hat_left, x_left, breaks, H):
    """``f(1/2) + int K(|1/2 - y|) u(y) dy`` with the right region on its fine grid."""
    k = prob.k
    vf = backward_recursion_v(ops, v_right)
    gf = -backward_recursion_g(ops)
    uf = (vf + gf).real
    fb = fine_local_breaks(prob.n_sub, H)
    # target at local distance 0; right region in local coordinates
    W_right = kernel_matrix([0.0], fb, k)[0]
    # left region: distance from the right endpoint is 1 - t_left
    W_left = kernel_matrix([0.5], breaks[:3], k)[0]
    f_end = float(rhs_local(0.0, k, prob.regularized)) * -1.0
    return f_end + float(W_right @ uf) + float(W_left @ rho_hat_left.real)


def condition_number(k, npan=4):
    """2-norm condition number of the plain coarse Nystrom system ``I - K``."""
    breaks = np.linspace(-0.5, 0.5, npan + 1)
    x, _ = panel_nodes(breaks)
    return float(np.linalg.cond(np.eye(x.size) - kernel_matrix(x, breaks, k)))


def subdivision_depth(k, npan=4):
    """Deepest bisection used when assembling the coarse matrix."""
    breaks = np.linspace(-0.5, 0.5, npan + 1)
    x, _ = panel_nodes(breaks)
    return make_plan(x, breaks, k).max_depth
