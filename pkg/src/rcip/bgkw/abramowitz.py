"""Abramowitz functions ``J_n(x) = int_0^inf t^n exp(-t^2 - x/t) dt``, ``n = -1, 0, 1``.

Small arguments use the convergent expansion obtained from the residues of
the Mellin transform ``Gamma(z) Gamma((z + n + 1)/2) / 2``, which has the
form ``sum a_m x^m + log(x) sum b_m x^m``.  Larger arguments use piecewise
Chebyshev interpolants of ``J_n(x) exp(3 (x/2)^(2/3))`` on dyadic intervals,
fitted once to composite Gauss-Legendre quadrature of the defining integral.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial import chebyshev
from scipy.special import digamma, gamma, gammaln

from ..quadrature import gauss_legendre

ORDERS = (-1, 0, 1)
SERIES_MAX = 2.0
X_MAX = 2048.0
N_TERMS = 64


@dataclass(frozen=True)
class SeriesCoefficients:
    """``J_n(x) = sum_m a[m] x^m + log(x) sum_m b[m] x^m``."""

    n: int
    a: np.ndarray
    b: np.ndarray


@lru_cache(maxsize=None)
def series_coefficients(n, terms=N_TERMS):
    if n not in ORDERS:
        raise ValueError(f"order {n} not supported")
    a = np.zeros(terms)
    b = np.zeros(terms)
    for m in range(terms):
        p2 = m - n - 1
        if p2 >= 0 and p2 % 2 == 0:
            # double pole of Gamma(z) Gamma((z+n+1)/2) at z = -m
            p = p2 // 2
            c = 0.5 * (-1) ** (m + p) * np.exp(-gammaln(m + 1) - gammaln(p + 1))
            a[m] = c * (2 * digamma(m + 1) + digamma(p + 1))
            b[m] = -2 * c
        else:
            a[m] = 0.5 * (-1) ** m * gamma((n + 1 - m) / 2) / np.exp(gammaln(m + 1))
    for arr in (a, b):
        arr.setflags(write=False)
    return SeriesCoefficients(n, a, b)


def series(n, x):
    """Small-argument expansion; accurate to ~1e-15 for ``0 <= x <= 2``."""
    x = np.asarray(x, dtype=float)
    sc = series_coefficients(n)
    out = np.polynomial.polynomial.polyval(x, sc.a)
    if np.any(sc.b):
        with np.errstate(divide="ignore", invalid="ignore"):
            lg = np.where(x > 0, np.log(np.where(x > 0, x, 1.0)), 0.0)
        out = out + lg * np.polynomial.polynomial.polyval(x, sc.b)
    return out


def _scale(x):
    return 3.0 * (np.asarray(x, dtype=float) / 2.0) ** (2.0 / 3.0)


def integral(n, x, panels=None):
    """``J_n(x) exp(3 (x/2)^(2/3))`` by composite Gauss-Legendre quadrature in ``t``.

    The integrand peaks at ``t* = (x/2)^(1/3)`` with width of order one;
    panels of width 1/4 cover ``[0, t* + 9]``, where it is negligible.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    rule = gauss_legendre(16)
    out = np.empty(x.size)
    for i, xi in enumerate(x):
        ts = (xi / 2) ** (1 / 3)
        top = ts + 9.0
        npn = int(np.ceil(top / 0.25)) if panels is None else panels
        br = np.linspace(0.0, top, npn + 1)
        mid, half = (br[:-1] + br[1:]) / 2, np.diff(br) / 2
        t = (mid[:, None] + half[:, None] * rule.nodes).ravel()
        w = (half[:, None] * rule.weights).ravel()
        with np.errstate(divide="ignore", over="ignore"):
            e = -t * t - xi / t + _scale(xi)
            f = t ** n * np.exp(e)
        f[~np.isfinite(f)] = 0.0
        out[i] = np.dot(w, f)
    return out


@dataclass(frozen=True)
class _ChebTable:
    edges: np.ndarray
    coefs: tuple


@lru_cache(maxsize=None)
def _cheb_table(n, degree=40):
    edges = [SERIES_MAX]
    while edges[-1] < X_MAX:
        edges.append(edges[-1] * 2)
    edges = np.array(edges)
    coefs = []
    k = np.arange(degree + 1)
    nodes = np.cos(np.pi * (k + 0.5) / (degree + 1))
    for a, b in zip(edges[:-1], edges[1:]):
        x = (a + b) / 2 + (b - a) / 2 * nodes
        coefs.append(chebyshev.chebfit(nodes, integral(n, x), degree))
    return _ChebTable(edges, tuple(coefs))


def _cheb_eval(n, x):
    tab = _cheb_table(n)
    out = np.zeros(x.shape)
    j = np.searchsorted(tab.edges, x, side="right") - 1
    for k in np.unique(j):
        if k < 0 or k >= len(tab.coefs):
            continue
        sel = j == k
        a, b = tab.edges[k], tab.edges[k + 1]
        out[sel] = chebyshev.chebval((2 * x[sel] - a - b) / (b - a), tab.coefs[k])
    return out * np.exp(-_scale(x))


def abramowitz_j(n, x):
    """``J_n(x)`` for ``n in (-1, 0, 1)`` and real ``x >= 0`` (``x > 0`` for ``n = -1``).

    Values beyond ``x = 2048`` (below 1e-130) are returned as zero.
    """
    if n not in ORDERS:
        raise ValueError(f"order {n} not supported")
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    if np.any(x < 0) or np.any(np.isnan(x)):
        raise ValueError("x must be non-negative")
    if n == -1 and np.any(x == 0):
        raise ValueError("J_{-1} diverges at x = 0")
    out = np.empty(x.shape)
    small = x <= SERIES_MAX
    out[small] = series(n, x[small])
    out[~small] = _cheb_eval(n, x[~small])
    return out[0] if scalar else out


# --- kernel split of J_{-1} near the origin ---------------------------------

SPLIT_RADIUS = 4.0


@lru_cache(maxsize=None)
def _split_coefficients():
    sc = series_coefficients(-1)
    m = np.arange(sc.a.size)
    S = np.where(m % 2 == 0, sc.a, 0.0)
    L = sc.b.copy()
    # odd powers x^m = |s| s^(m-1)
    A = np.zeros_like(sc.a)
    A[:-1] = np.where(m[1:] % 2 == 1, sc.a[1:], 0.0)
    return S, L, A


def j_minus1_split(s):
    """``(S, L, A)`` with ``J_{-1}(|s|) = S(s) + L(s) log|s| + A(s) |s|``.

    ``S``, ``L`` and ``A`` are even entire functions of ``s`` given by their
    power series.  Only valid for ``|s| <= SPLIT_RADIUS``.
    """
    s = np.asarray(s, dtype=float)
    if np.any(np.abs(s) > SPLIT_RADIUS):
        raise ValueError(f"|s| exceeds the split radius {SPLIT_RADIUS}")
    S, L, A = _split_coefficients()
    P = np.polynomial.polynomial.polyval
    return P(s, S), P(s, L), P(s, A)
