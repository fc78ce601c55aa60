import numpy as np
import pytest

from rcip.geometry import (build_coarse_mesh, contour_one_corner, grid_on, level_scale,
                           local_type_b_grid, panel_nodes, type_b_breaks)
from rcip.quadrature import gauss_legendre


def test_circle_radius():
    c = contour_one_corner(np.pi)
    z, _, _ = c.eval(np.array([0.25, 0.5, -0.25]))
    np.testing.assert_allclose(np.abs(z - 0.5), 0.5, atol=1e-15)


@pytest.mark.parametrize("theta", [np.pi / 3, np.pi / 2, np.pi])
def test_corner_at_origin(theta):
    c = contour_one_corner(theta)
    z, _, _ = c.eval(np.array([0.0, 0.5, -0.5]))
    assert abs(z[0]) == 0.0
    # s = 1 and s = 0 coincide: t = 1/2 and t = -1/2 are the same point
    assert abs(z[1] - z[2]) < 1e-15


def test_right_angle_midpoint():
    z, _, _ = contour_one_corner(np.pi / 2).eval(np.array([0.5]))
    assert abs(z[0] - 1.0) < 1e-15


def test_theta_range():
    with pytest.raises(ValueError):
        contour_one_corner(0.0)
    with pytest.raises(ValueError):
        contour_one_corner(4.0)


def test_derivatives_by_finite_differences():
    c = contour_one_corner(np.pi / 2)
    t = np.array([-0.3, -0.05, 0.07, 0.4])
    h = 1e-5
    z1, zp1, _ = c.eval(t + h)
    z0, zp0, _ = c.eval(t - h)
    _, zp, zpp = c.eval(t)
    assert np.max(np.abs((z1 - z0) / (2 * h) - zp)) < 1e-8
    assert np.max(np.abs((zp1 - zp0) / (2 * h) - zpp)) < 1e-7


class TestCoarseMesh:
    def test_node_count(self):
        assert build_coarse_mesh(contour_one_corner(np.pi / 2), 10).n == 160

    def test_circle_circumference(self):
        m = build_coarse_mesh(contour_one_corner(np.pi), 10)
        assert abs(m.grid.awzp.sum() - np.pi) <= 1e-12

    def test_star_panels(self):
        m = build_coarse_mesh(contour_one_corner(np.pi / 2), 10)
        # 1-based {npan-1, npan, 1, 2}
        assert list(m.star_panels + 1) == [9, 10, 1, 2]
        assert m.star_idx.size == 64
        assert np.all(m.panel_of_node[m.star_idx] == np.repeat(m.star_panels, 16))

    def test_star_nodes_order(self):
        m = build_coarse_mesh(contour_one_corner(np.pi / 2), 10)
        t = m.grid.t[m.star_idx]
        assert np.all(np.diff(t) > 0)
        assert t[0] > -0.2 and t[-1] < 0.2

    def test_too_few_panels(self):
        with pytest.raises(ValueError):
            build_coarse_mesh(contour_one_corner(np.pi), 3)

    def test_quadrature_exactness(self):
        breaks = np.linspace(0, 1, 6)
        t, w = panel_nodes(breaks)
        for deg in (0, 7, 31):
            # panelwise polynomial: shift to each panel's left end
            left = np.repeat(breaks[:-1], 16)
            exact = sum((b - a) ** (deg + 1) / (deg + 1) for a, b in zip(breaks[:-1], breaks[1:]))
            assert abs(w @ (t - left) ** deg - exact) <= 1e-13 * exact


class TestLocalGrid:
    def test_outer_panels_match_coarse(self):
        c = contour_one_corner(np.pi / 2)
        npan, n_sub = 10, 5
        lg = local_type_b_grid(c, n_sub, n_sub, npan)
        m = build_coarse_mesh(c, npan)
        zc = m.grid.z[m.star_idx]
        zb = lg.grid.z
        assert np.max(np.abs(zb[:16] - zc[:16])) < 1e-15
        assert np.max(np.abs(zb[80:] - zc[48:])) < 1e-15
        assert len(lg.grid) == 96

    def test_dyadic_scale(self):
        assert level_scale(3, 5, 10) == 2 * level_scale(2, 5, 10)

    def test_direct_evaluation(self):
        theta, npan, n_sub = np.pi / 2, 10, 3
        lg = local_type_b_grid(contour_one_corner(theta), 1, n_sub, npan)
        h = 1 / (npan * 2 ** (n_sub - 1))
        assert lg.h == h == 1 / 40
        T = gauss_legendre(16).nodes
        s = np.concatenate([T / 4 + 0.25, T / 4 + 0.75, T / 2 + 1.5]) * h
        r = np.sin(np.pi * s) * np.exp(1j * (s - 0.5) * theta)
        expect = np.concatenate([np.conj(r[::-1]), r])
        assert np.max(np.abs(lg.grid.z - expect)) <= 1e-15 * h * 10

    def test_conjugate_symmetry(self):
        lg = local_type_b_grid(contour_one_corner(np.pi / 2), 2, 4, 10)
        z = lg.grid.z
        assert np.array_equal(z[:48], np.conj(z[48:][::-1]))

    def test_panel_lengths(self):
        h = 0.1
        assert np.allclose(np.diff(type_b_breaks(h)), [h, h / 2, h / 2, h / 2, h / 2, h])

    def test_level_range(self):
        with pytest.raises(ValueError):
            local_type_b_grid(contour_one_corner(np.pi), 0, 3, 10)
        with pytest.raises(ValueError):
            local_type_b_grid(contour_one_corner(np.pi), 4, 3, 10)

    def test_normals(self):
        g = grid_on(contour_one_corner(np.pi), np.linspace(0.05, 0.45, 3))
        # outward normal on a counterclockwise circle centred at 1/2
        out = (g.z - 0.5) / np.abs(g.z - 0.5)
        assert np.max(np.abs(g.normal - out)) < 1e-14
