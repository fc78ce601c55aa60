"""Kernel and right-hand-side models for the Laplace driver problems."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np


@dataclass(frozen=True)
class KernelModel:
    """A Nystrom-discretizable kernel.

    ``matrix(grid)`` returns the dense matrix ``K[i, j]`` (quadrature weights
    included) acting on nodal values of the density on ``grid``.
    """

    matrix: Callable
    scale_invariant_on_wedges: bool = False
    name: str = ""


def laplace_dlp_kernel(lam):
    """``K rho(r) = 2 lam int dG/dnu_r (r, r') rho(r') dl'`` with ``G = -log|r - r'| / (2 pi)``.

    In complex notation the entry is
    ``lam/pi * Re(nu_i / (z_j - z_i)) |z'_j| w_j`` and the diagonal limit is
    ``-lam/(2 pi) * Im(z''_i / z'_i) w_i``.
    """
    lam = complex(lam)

    def matrix(grid):
        z = grid.z
        nu = grid.normal
        with np.errstate(divide="ignore", invalid="ignore"):
            K = np.real(nu[:, None] / (z[None, :] - z[:, None])) * grid.awzp[None, :]
        np.fill_diagonal(K, -np.imag(grid.zpp / grid.zp) * grid.w / 2)
        return (lam / np.pi) * K

    return KernelModel(matrix, scale_invariant_on_wedges=True, name="laplace-dlp")


def zero_kernel():
    return KernelModel(lambda grid: np.zeros((len(grid), len(grid)), dtype=complex),
                       scale_invariant_on_wedges=True, name="zero")


def star_mask(n, idx):
    """Boolean matrix selecting the block ``idx x idx`` of an ``n x n`` matrix."""
    m = np.zeros((n, n), dtype=bool)
    m[np.ix_(idx, idx)] = True
    return m


def split_star_circ(K, idx):
    """``(K_star, K_circ)`` with ``K_star`` the ``idx x idx`` block and ``K_circ = K - K_star``."""
    mask = star_mask(K.shape[0], idx)
    return np.where(mask, K, 0), np.where(mask, 0, K)


@dataclass(frozen=True)
class RhsModel:
    """Right-hand side ``f`` evaluated from the signed parameter and position.

    ``leading`` is the homogeneous leading singular term used by the
    fixed-point initializers, or ``None`` when it is not known.
    """

    func: Callable
    singular_points: tuple = (0.0,)
    leading: Optional[Callable] = None
    name: str = ""

    def eval(self, grid):
        t = np.asarray(grid.t)
        if np.any(t == 0.0):
            raise ValueError("f cannot be evaluated at a singular point")
        return np.asarray(self.func(t, grid.z), dtype=complex)

    def leading_eval(self, grid):
        if self.leading is None:
            raise ValueError("no homogeneous leading term declared")
        return np.asarray(self.leading(grid.t, grid.z), dtype=complex)

    def split(self, f, idx):
        """``(f_star, f_circ)``: ``f`` restricted to ``idx`` and to its complement."""
        fs = np.zeros_like(f)
        fs[idx] = f[idx]
        return fs, f - fs


def _power(x, alpha):
    return np.exp(-alpha * np.log(x))


def _check_alpha(alpha):
    alpha = complex(alpha)
    if not (alpha.real < 1 or (alpha.real == 1 and alpha.imag != 0)):
        raise ValueError("need Re(alpha) < 1 or alpha = 1 + it with t != 0")
    return alpha


def rhs_circle(alpha):
    """``f = l^-alpha + (pi - l)^-alpha`` on the circle of circumference pi.

    ``l`` is the counterclockwise arclength from the singular point; on the
    ``theta = pi`` contour ``l = pi t`` exactly, so with the signed parameter
    ``f = (pi |t|)^-alpha + (pi (1 - |t|))^-alpha``.
    """
    alpha = _check_alpha(alpha)

    def f(t, z):
        a = np.abs(t)
        return _power(np.pi * a, alpha) + _power(np.pi * (1 - a), alpha)

    return RhsModel(f, leading=lambda t, z: _power(np.abs(z), alpha),
                    name=f"circle(alpha={alpha})")


def rhs_one_corner(alpha):
    """``f(r) = |r|^-alpha + log|r|``."""
    alpha = _check_alpha(alpha)

    def f(t, z):
        r = np.abs(z)
        return _power(r, alpha) + np.log(r)

    return RhsModel(f, leading=lambda t, z: _power(np.abs(z), alpha),
                    name=f"one-corner(alpha={alpha})")


def rhs_smooth(func):
    """A panelwise smooth right-hand side ``func(z)`` (no singular behaviour)."""
    return RhsModel(lambda t, z: func(z), leading=None, name="smooth")


def circle_exact_rho(alpha, lam, t):
    """Exact density on the circle: ``f + 2 lam pi^-alpha / ((1 - alpha)(1 - lam))``."""
    alpha, lam = complex(alpha), complex(lam)
    if alpha == 1 or lam == 1:
        raise ValueError("no solution for alpha = 1 or lambda = 1")
    f = rhs_circle(alpha).func(np.asarray(t, dtype=float), None)
    return f + 2 * lam * _power(np.pi, alpha) / ((1 - alpha) * (1 - lam))


def circle_exact_q(alpha, lam):
    """``q = 2 pi^(1 - alpha) / ((1 - alpha)(1 - lam))``."""
    alpha, lam = complex(alpha), complex(lam)
    if alpha == 1 or lam == 1:
        raise ValueError("no solution for alpha = 1 or lambda = 1")
    return 2 * np.pi ** (1 - alpha) / ((1 - alpha) * (1 - lam))
