"""Contours, coarse panel meshes and the local type-b grids of the recursion.

Points in the plane are complex numbers.  Every contour is evaluated through
a *signed* parameter ``t`` measured from its singular point, so that nodes
close to the singular point are computed without cancellation (the local
grids are effectively translated to the origin).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .quadrature import NGL, Layout, gauss_legendre


@dataclass(frozen=True)
class Contour:
    """A closed curve ``z(t)`` with one singular point at ``t = 0``.

    ``zfunc``, ``zpfunc`` and ``zppfunc`` accept signed parameters
    ``t`` in ``[-1/2, 1/2]``; the point ``t`` and ``t + 1`` coincide.
    """

    zfunc: Callable
    zpfunc: Callable
    zppfunc: Callable
    corner_angle: float = np.pi
    singular_points: tuple = (0.0,)
    closed: bool = True

    def eval(self, t):
        t = np.asarray(t, dtype=float)
        return self.zfunc(t), self.zpfunc(t), self.zppfunc(t)


def _mirror(fpos, fneg):
    def f(t):
        t = np.asarray(t, dtype=float)
        out = np.empty(t.shape, dtype=complex)
        pos = t >= 0
        out[pos] = fpos(t[pos])
        out[~pos] = fneg(-t[~pos])
        return out
    return f


def contour_one_corner(theta):
    """``r(s) = sin(pi s) (cos((s - 1/2) theta), sin((s - 1/2) theta))``.

    The corner of opening angle ``theta`` sits at the origin.  Negative
    parameters use the mirror symmetry ``z(-t) = conj(z(t))``.
    """
    if not 0 < theta <= np.pi:
        raise ValueError("theta must lie in (0, pi]")

    def z(s):
        return np.sin(np.pi * s) * np.exp(1j * (s - 0.5) * theta)

    def zp(s):
        e = np.exp(1j * (s - 0.5) * theta)
        return (np.pi * np.cos(np.pi * s) + 1j * theta * np.sin(np.pi * s)) * e

    def zpp(s):
        e = np.exp(1j * (s - 0.5) * theta)
        return (2j * np.pi * theta * np.cos(np.pi * s)
                - (np.pi ** 2 + theta ** 2) * np.sin(np.pi * s)) * e

    return Contour(
        zfunc=_mirror(z, lambda s: np.conj(z(s))),
        zpfunc=_mirror(zp, lambda s: -np.conj(zp(s))),
        zppfunc=_mirror(zpp, lambda s: np.conj(zpp(s))),
        corner_angle=theta,
    )


def wedge_contour(theta, speed=np.pi):
    """Two straight rays leaving the origin at angles ``-theta/2`` and ``theta/2``.

    This is the scale-invariant limit of :func:`contour_one_corner` at its
    corner and is used to build fixed-point initializers.
    """
    e = np.exp(-0.5j * theta)
    return Contour(
        zfunc=_mirror(lambda s: speed * s * e, lambda s: np.conj(speed * s * e)),
        zpfunc=_mirror(lambda s: speed * e + 0 * s, lambda s: -np.conj(speed * e + 0 * s)),
        zppfunc=lambda s: np.zeros(np.shape(s), dtype=complex),
        corner_angle=theta,
    )


@dataclass(frozen=True)
class Grid:
    """Nodes, parameter weights and curve data of a composite Gauss-Legendre grid."""

    t: np.ndarray
    w: np.ndarray
    z: np.ndarray
    zp: np.ndarray
    zpp: np.ndarray

    @property
    def speed(self):
        return np.abs(self.zp)

    @property
    def normal(self):
        return -1j * self.zp / np.abs(self.zp)

    @property
    def awzp(self):
        """Arclength quadrature weights ``w |z'|``."""
        return self.w * np.abs(self.zp)

    def __len__(self):
        return self.t.size


def panel_nodes(breaks, n=NGL):
    """Gauss-Legendre nodes and weights on consecutive panels ``breaks[k]..breaks[k+1]``."""
    T, W = gauss_legendre(n).nodes, gauss_legendre(n).weights
    a = np.asarray(breaks[:-1], dtype=float)
    b = np.asarray(breaks[1:], dtype=float)
    mid, half = (a + b) / 2, (b - a) / 2
    t = (mid[:, None] + half[:, None] * T).ravel()
    w = (half[:, None] * W).ravel()
    return t, w


def grid_on(contour, breaks, n=NGL):
    t, w = panel_nodes(breaks, n)
    z, zp, zpp = contour.eval(t)
    return Grid(t, w, z, zp, zpp)


@dataclass(frozen=True)
class Mesh:
    """Coarse mesh of ``npan`` panels on a closed contour.

    ``breaks`` are in the signed parameter, running from ``-1/2`` to ``1/2``
    when the panel count is even; the singular point ``t = 0`` is always a
    breakpoint.  ``star_panels`` (0-based, in increasing ``t``) are the four
    panels nearest the singular point; ``star_idx`` are their node indices in
    the same order.
    """

    contour: Contour
    npan: int
    breaks: np.ndarray
    grid: Grid
    star_panels: np.ndarray
    star_idx: np.ndarray
    panel_of_node: np.ndarray = field(repr=False)

    @property
    def n(self):
        return len(self.grid)


def build_coarse_mesh(contour, npan, breaks=None):
    """Equal-parameter panels on ``[0, 1)`` with the singular point at ``s = 0``.

    Panel ``k`` (0-based) covers ``[k/npan, (k+1)/npan]``; panels in the upper
    half of the parameter range are evaluated through the signed parameter
    ``s - 1``.  A custom sorted ``breaks`` array in ``[0, 1]`` may be given.
    """
    if npan < 4:
        raise ValueError("need at least four panels around the singular point")
    if breaks is None:
        breaks = np.arange(npan + 1) / npan
    breaks = np.asarray(breaks, dtype=float)
    if breaks[0] != 0.0 or breaks[-1] != 1.0 or breaks.size != npan + 1:
        raise ValueError("breaks must run from 0 to 1 with npan + 1 entries")
    signed = breaks.copy()
    # panels whose midpoint exceeds 1/2 are parameterized by s - 1
    upper = (breaks[:-1] + breaks[1:]) / 2 > 0.5
    ts, ws = [], []
    for k in range(npan):
        a, b = signed[k], signed[k + 1]
        if upper[k]:
            a, b = a - 1.0, b - 1.0
        t, w = panel_nodes([a, b])
        ts.append(t)
        ws.append(w)
    t = np.concatenate(ts)
    w = np.concatenate(ws)
    z, zp, zpp = contour.eval(t)
    grid = Grid(t, w, z, zp, zpp)
    star_panels = np.array([npan - 2, npan - 1, 0, 1])
    star_idx = (star_panels[:, None] * NGL + np.arange(NGL)).ravel()
    return Mesh(contour, npan, breaks, grid, star_panels, star_idx,
                np.repeat(np.arange(npan), NGL))


@dataclass(frozen=True)
class LocalGrid:
    level: int
    h: float
    grid: Grid
    layout: Layout


def type_b_breaks(h, sides=2):
    """Breakpoints of the type-b mesh of scale ``h`` in the signed parameter."""
    pos = np.array([0.0, 0.5, 1.0, 2.0]) * h
    if sides == 1:
        return pos
    return np.concatenate([-pos[:0:-1], pos])


def type_c_breaks(h, sides=2):
    pos = np.array([0.0, 1.0, 2.0]) * h
    if sides == 1:
        return pos
    return np.concatenate([-pos[:0:-1], pos])


def level_scale(level, n_sub, npan):
    return 1.0 / npan / 2.0 ** (n_sub - level)


def local_type_b_grid(contour, level, n_sub, npan):
    """96-point grid on the six-panel type-b mesh around the singular point.

    Panels have parameter lengths ``h, h/2, h/2, h/2, h/2, h`` with
    ``h = 1 / (npan 2^(n_sub - level))``; nodes run from the negative-parameter
    side to the positive one.
    """
    if not 1 <= level <= n_sub:
        raise ValueError(f"level {level} outside 1..{n_sub}")
    h = level_scale(level, n_sub, npan)
    return LocalGrid(level, h, grid_on(contour, type_b_breaks(h)), Layout(2))
