"""Gauss-Legendre rules, panel interpolation and prolongation operators.

All interpolation is polynomial in the boundary parameter, panel by panel,
using the Legendre basis evaluated at Gauss-Legendre nodes.  Product
integration weights for ``log|t - t0|`` and ``|t - t0|`` kernels are built
from exact Legendre moments.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial import legendre

NGL = 16


@dataclass(frozen=True)
class GLRule:
    nodes: np.ndarray
    weights: np.ndarray

    @property
    def n(self):
        return self.nodes.size


@lru_cache(maxsize=None)
def _gl(n):
    x, w = legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_legendre(n=NGL):
    """Gauss-Legendre rule on (-1, 1) with ascending nodes."""
    if n < 1:
        raise ValueError("n must be positive")
    return GLRule(*_gl(n))


def legendre_values(x, n):
    """Matrix ``V[j, k] = P_k(x_j)`` for ``k < n``."""
    return legendre.legvander(np.asarray(x, dtype=float), n - 1)


def interp_matrix(x, n=NGL):
    """Lagrange interpolation from the ``n`` Gauss-Legendre nodes to points ``x``.

    Built as ``V(x) diag((2k+1)/2) V(T)^T diag(W)``, which uses the discrete
    orthogonality of the Legendre polynomials on the Gauss nodes instead of
    inverting a Vandermonde matrix.
    """
    T, W = _gl(n)
    scale = (2 * np.arange(n) + 1) / 2.0
    return (legendre_values(x, n) * scale) @ (legendre_values(T, n).T * W)


@lru_cache(maxsize=None)
def _halving_interp(n):
    T, W = _gl(n)
    x = np.concatenate([(T - 1) / 2, (T + 1) / 2])
    IP = interp_matrix(x, n)
    W2 = np.concatenate([W, W]) / 2
    IPW = IP * np.outer(W2, 1.0 / W)
    return IP, IPW


@dataclass(frozen=True)
class Layout:
    """Index conventions for the local type-b/type-c grids of one singular point.

    ``sides=2`` is an interior point of a closed contour: the b-mesh has six
    panels and the c-mesh four, ordered by increasing signed parameter.
    ``sides=1`` is an open-arc endpoint: three b-panels and two c-panels,
    ordered by increasing distance from the endpoint.
    """

    sides: int
    n: int = NGL

    @property
    def nb(self):
        return 3 * self.sides * self.n

    @property
    def nc(self):
        return 2 * self.sides * self.n

    @property
    def star_b(self):
        """b-grid indices that form the c-grid of the next finer level."""
        n = self.n
        if self.sides == 2:
            return np.arange(n, 5 * n)
        return np.arange(0, 2 * n)

    @property
    def circ_b(self):
        n = self.n
        if self.sides == 2:
            return np.concatenate([np.arange(0, n), np.arange(5 * n, 6 * n)])
        return np.arange(2 * n, 3 * n)

    @property
    def starstar_c(self):
        """c-grid indices on the panels touching the singular point."""
        n = self.n
        if self.sides == 2:
            return np.arange(n, 3 * n)
        return np.arange(0, n)


def build_P_bc(layout=Layout(2)):
    """Level-independent prolongations ``(P_bc, P_Wbc)`` from c-grid to b-grid.

    Two-sided: ``blockdiag(I, IP, IP, I)``; one-sided: ``blockdiag(IP, I)``,
    where ``IP`` interpolates one panel onto its two halves.  ``P_Wbc`` is
    ``W_b P_bc W_c^-1`` so that ``P_Wbc^T P_bc = I``.
    """
    n = layout.n
    IP, IPW = _halving_interp(n)
    I = np.eye(n)
    if layout.sides == 2:
        blocks, wblocks = (I, IP, IP, I), (I, IPW, IPW, I)
    else:
        blocks, wblocks = (IP, I), (IPW, I)
    return _blockdiag(blocks), _blockdiag(wblocks)


def _blockdiag(blocks):
    rows = sum(b.shape[0] for b in blocks)
    cols = sum(b.shape[1] for b in blocks)
    out = np.zeros((rows, cols), dtype=complex)
    r = c = 0
    for b in blocks:
        out[r:r + b.shape[0], c:c + b.shape[1]] = b
        r += b.shape[0]
        c += b.shape[1]
    return out


def rank_one_pf_block(f_coa, f_fin):
    """Rank-one prolongation ``f_fin f_coa^H / (f_coa^H f_coa)``.

    It maps ``f_coa`` exactly onto ``f_fin``.  The two vectors may have
    different lengths.
    """
    f_coa = np.asarray(f_coa, dtype=complex).ravel()
    f_fin = np.asarray(f_fin, dtype=complex).ravel()
    nrm2 = np.vdot(f_coa, f_coa).real
    if nrm2 == 0.0:
        raise ValueError("f_coa is zero")
    return np.outer(f_fin, f_coa.conj()) / nrm2


def build_P_f_bc(f_b, f_c, layout=Layout(2)):
    """f-dependent prolongation from c-grid to b-grid on one level.

    Identical to ``P_bc`` except that the block mapping the c-panels that
    touch the singular point onto the b-panels covering them is replaced by
    the rank-one block built from ``f`` sampled on the two grids.
    """
    P, _ = build_P_bc(layout)
    rows = layout.star_b
    cols = layout.starstar_c
    P[np.ix_(rows, cols)] = rank_one_pf_block(np.asarray(f_c)[cols], np.asarray(f_b)[rows])
    return P


# --- product integration ---------------------------------------------------

def _legendre_q_pv(x, nmax):
    """``Q[k] = PV int_{-1}^{1} P_k(t) / (t - x) dt`` for ``k <= nmax``, ``|x| < 1``.

    Forward recurrence, which is stable inside the interval.
    """
    q = np.empty(nmax + 1)
    q[0] = np.log((1 - x) / (1 + x))
    if nmax >= 1:
        q[1] = 2.0 + x * q[0]
    for k in range(1, nmax):
        q[k + 1] = ((2 * k + 1) * x * q[k] - k * q[k - 1]) / (k + 1)
    return q


def log_moments(x, n):
    """``m[k] = int_{-1}^{1} P_k(t) log|t - x| dt`` for ``k < n`` and ``|x| <= 1``."""
    x = float(x)
    if abs(x) > 1:
        raise ValueError("log moments are only available for targets on the panel")
    m = np.empty(n)
    m[0] = _xlogx(1 - x) + _xlogx(1 + x) - 2.0
    if n == 1:
        return m
    if abs(x) == 1.0:
        # int P_k(t) log(1 - t) dt = -2 / (k (k + 1)) for k >= 1, mirrored for x = -1
        k = np.arange(1, n)
        m[1:] = -2.0 / (k * (k + 1)) * (x ** k)
        return m
    q = _legendre_q_pv(x, n)
    k = np.arange(1, n)
    m[1:] = -(q[k + 1] - q[k - 1]) / (2 * k + 1)
    return m


def abs_moments(x, n):
    """``m[k] = int_{-1}^{1} P_k(t) |t - x| dt`` for ``k < n``, any real ``x``."""
    return _abs_moments_by_pieces(float(x), n)


def _xlogx(a):
    return 0.0 if a == 0 else a * np.log(a)


def _abs_moments_by_pieces(x, n):
    # |t - x| is a polynomial on each side of x, so a Gauss rule there is exact
    out = np.zeros(n)
    T, W = _gl(n + 2)
    c = min(max(x, -1.0), 1.0)
    for a, b in ((-1.0, c), (c, 1.0)):
        if b <= a:
            continue
        t = (a + b) / 2 + (b - a) / 2 * T
        out += legendre_values(t, n).T @ (W * (b - a) / 2 * np.abs(t - x))
    return out


def product_weights(moments, n):
    """Convert Legendre moments into nodal weights on the ``n`` Gauss nodes."""
    T, W = _gl(n)
    scale = (2 * np.arange(n) + 1) / 2.0
    return W * (legendre_values(T, n) @ (scale * moments))


def singular_correction_weights(kind, target, n=NGL):
    """Product-integration weights on the reference panel (-1, 1).

    Returns ``w`` with ``sum_j w_j p(T_j) = int_{-1}^{1} p(t) s(|t - target|) dt``
    for polynomials ``p`` of degree ``< n``, where ``s`` is ``log`` for
    ``kind='log'`` and the identity for ``kind='abs'``.
    """
    if kind == "log":
        mom = log_moments(target, n)
    elif kind == "abs":
        mom = abs_moments(target, n)
    else:
        raise ValueError(f"unknown kind {kind!r}")
    return product_weights(mom, n)
