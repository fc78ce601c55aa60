"""Per-target quadrature weights for the kernel ``J_{-1}(|x - y|/k) / (k sqrt(pi))``.

For one target ``x`` and one source panel ``[a, b]`` carrying a degree-15
density polynomial (known at its 16 Gauss-Legendre nodes) the panel is
bisected towards ``x`` until every piece is either

* well separated (distance to ``x`` at least its length), where a plain
  16-point rule converges geometrically, or
* contains ``x`` and is short compared with ``k``, where the kernel is
  split as ``S + L log|s| + A |s|`` and integrated with 32-point product
  rules.

Bisection towards a point keeps adjacent pieces within a factor two in
size.  Values of the density on the pieces come from interpolating the
parent panel polynomial, so every (target, panel) pair yields 16 weights.

The pieces depend on ``k`` only through the two tests above, so the
geometric part of the assembly is collected in a cached :class:`Plan` and
the kernel is evaluated for all pieces in one vectorized pass.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..quadrature import NGL, gauss_legendre, interp_matrix, singular_correction_weights
from .abramowitz import X_MAX, abramowitz_j, j_minus1_split

SIGMA_MAX = 2.0
MAX_DEPTH = 60
N_PRODUCT = 32


class SubdivisionError(RuntimeError):
    pass


def kernel(d, k):
    """``J_{-1}(d/k) / (k sqrt(pi))`` for distances ``d > 0``."""
    s = np.asarray(d, dtype=float) / k
    out = np.zeros(s.shape)
    live = s < X_MAX
    out[live] = abramowitz_j(-1, s[live])
    return out / (k * np.sqrt(np.pi))


def subdivide(x, a, b, k, sigma_max=SIGMA_MAX, max_depth=MAX_DEPTH):
    """Split ``[a, b]`` into plain and product pieces for target ``x``.

    Returns ``(plain, product, depth)``; pieces farther than ``X_MAX k``
    from ``x`` carry negligible kernel values and are dropped.
    """
    plain, product = [], []
    stack = [(a, b, 0)]
    depth_seen = 0
    while stack:
        lo, hi, depth = stack.pop()
        depth_seen = max(depth_seen, depth)
        length = hi - lo
        if lo <= x <= hi:
            if length <= sigma_max * k:
                product.append((lo, hi))
                continue
        else:
            dist = lo - x if x < lo else x - hi
            if dist >= length:
                if dist < X_MAX * k:
                    plain.append((lo, hi))
                continue
        if depth >= max_depth:
            raise SubdivisionError(
                f"no resolution after {max_depth} bisections "
                f"(x={x!r}, panel=[{a!r}, {b!r}], k={k!r})")
        mid = 0.5 * (lo + hi)
        stack.append((lo, mid, depth + 1))
        stack.append((mid, hi, depth + 1))
    return plain, product, depth_seen


@dataclass(frozen=True)
class Plan:
    """Geometry-only part of a kernel matrix assembly.

    Plain nodes carry ``(x, y, omega)`` and product nodes additionally the
    half-length and the reference log/abs product weights of their piece.
    ``*_idx`` are flattened output positions of the interpolation rows.
    """

    shape: tuple
    p_x: np.ndarray
    p_y: np.ndarray
    p_om: np.ndarray
    p_interp: np.ndarray
    p_idx: np.ndarray
    q_x: np.ndarray
    q_y: np.ndarray
    q_om: np.ndarray
    q_hl: np.ndarray
    q_wlog: np.ndarray
    q_wabs: np.ndarray
    q_interp: np.ndarray
    q_idx: np.ndarray
    pieces: int
    max_depth: int

    def apply(self, k):
        out = np.zeros(self.shape[0] * self.shape[1])
        if self.p_x.size:
            v = self.p_om * kernel(np.abs(self.p_x - self.p_y), k)
            out += np.bincount(self.p_idx.ravel(), (v[:, None] * self.p_interp).ravel(),
                               minlength=out.size)
        if self.q_x.size:
            S, L, A = j_minus1_split((self.q_x - self.q_y) / k)
            c = (self.q_om * S
                 + L * (self.q_om * (np.log(self.q_hl) - np.log(k)) + self.q_hl * self.q_wlog)
                 + A * (self.q_hl ** 2 / k) * self.q_wabs) / (k * np.sqrt(np.pi))
            out += np.bincount(self.q_idx.ravel(), (c[:, None] * self.q_interp).ravel(),
                               minlength=out.size)
        return out.reshape(self.shape)


def _build_plan(targets, breaks, layout, n):
    npan = len(breaks) - 1
    shape = (len(targets), npan * n)
    g = gauss_legendre(n)
    gq = gauss_legendre(N_PRODUCT)
    cols = np.arange(n)
    P = {key: [] for key in ("x", "y", "om", "xi", "idx")}
    Q = {key: [] for key in ("x", "y", "om", "hl", "wlog", "wabs", "xi", "idx")}
    pieces = depth = 0
    for i, pans in enumerate(layout):
        x = targets[i]
        for p, (plain, product, d) in enumerate(pans):
            a, b = breaks[p], breaks[p + 1]
            mid, half = 0.5 * (a + b), 0.5 * (b - a)
            pieces += len(plain) + len(product)
            depth = max(depth, d)
            base = i * shape[1] + p * n + cols
            for lo, hi in plain:
                m, hl = 0.5 * (lo + hi), 0.5 * (hi - lo)
                y = m + hl * g.nodes
                P["x"].append(np.full(n, x))
                P["y"].append(y)
                P["om"].append(hl * g.weights)
                P["xi"].append((y - mid) / half)
                P["idx"].append(np.tile(base, (n, 1)))
            for lo, hi in product:
                m, hl = 0.5 * (lo + hi), 0.5 * (hi - lo)
                tau = min(max((x - m) / hl, -1.0), 1.0)
                y = m + hl * gq.nodes
                Q["x"].append(np.full(gq.n, x))
                Q["y"].append(y)
                Q["om"].append(hl * gq.weights)
                Q["hl"].append(np.full(gq.n, hl))
                Q["wlog"].append(singular_correction_weights("log", tau, gq.n))
                Q["wabs"].append(singular_correction_weights("abs", tau, gq.n))
                Q["xi"].append((y - mid) / half)
                Q["idx"].append(np.tile(base, (gq.n, 1)))

    def cat(lst, width=None):
        if lst:
            return np.concatenate(lst)
        return np.zeros((0, width)) if width else np.zeros(0)

    return Plan(
        shape,
        cat(P["x"]), cat(P["y"]), cat(P["om"]),
        interp_matrix(cat(P["xi"]), n), cat(P["idx"], n).astype(np.int64),
        cat(Q["x"]), cat(Q["y"]), cat(Q["om"]), cat(Q["hl"]), cat(Q["wlog"]), cat(Q["wabs"]),
        interp_matrix(cat(Q["xi"]), n), cat(Q["idx"], n).astype(np.int64),
        pieces, depth)


@lru_cache(maxsize=64)
def _cached_plan(targets, breaks, layout, n):
    return _build_plan(np.array(targets), np.array(breaks), layout, n)


def make_plan(targets, breaks, k, n=NGL, sigma_max=SIGMA_MAX, max_depth=MAX_DEPTH):
    """Plan for the matrix from the panels ``breaks`` to the points ``targets``."""
    targets = tuple(float(x) for x in np.atleast_1d(targets))
    breaks = tuple(float(b) for b in breaks)
    layout = tuple(
        tuple(
            (tuple(pl), tuple(pr), d)
            for pl, pr, d in (subdivide(x, breaks[p], breaks[p + 1], k, sigma_max, max_depth)
                              for p in range(len(breaks) - 1)))
        for x in targets)
    return _cached_plan(targets, breaks, layout, n)


def kernel_matrix(targets, breaks, k, n=NGL, **kw):
    """Nystrom matrix of the kernel from the panels ``breaks`` to ``targets``."""
    return make_plan(targets, breaks, k, n, **kw).apply(k)


def panel_weights(x, a, b, k, n=NGL, **kw):
    """Weights ``W`` with ``sum_j W_j p(y_j) = int_a^b K(|x - y|) p(y) dy``.

    ``y_j`` are the ``n`` Gauss-Legendre nodes of ``[a, b]`` and ``p`` is
    any polynomial of degree below ``n``.
    """
    return kernel_matrix([x], [a, b], k, n, **kw)[0]
