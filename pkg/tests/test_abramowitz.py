import mpmath as mp
import numpy as np
import pytest

from rcip.bgkw.abramowitz import (SPLIT_RADIUS, abramowitz_j, integral, j_minus1_split, series,
                                  _scale)
from helpers import abramowitz_reference


def test_values_at_zero():
    assert abs(abramowitz_j(0, 0.0) - np.sqrt(np.pi) / 2) <= 1e-14
    assert abs(abramowitz_j(1, 0.0) - 0.5) <= 1e-14


def test_value_at_one():
    # two independent mpmath routes agreed to 20 digits
    ref = {-1: 0.18692873226152801862, 0: 0.15004596450516388138, 1: 0.14656338138597777543}
    for n, v in ref.items():
        assert abs(abramowitz_j(n, 1.0) / v - 1) <= 1e-13


@pytest.mark.parametrize("n", [-1, 0, 1])
def test_against_frozen_mpmath(n):
    d = abramowitz_reference()
    for xs, key in ((d["x"], str(n)), (d["x_large"], f"{n}_large")):
        ref = np.array(d[key])
        got = abramowitz_j(n, np.array(xs))
        assert np.max(np.abs(got / ref - 1)) <= 1e-12


@pytest.mark.parametrize("n", [-1, 0, 1])
def test_live_mpmath_spot_check(n):
    with mp.workdps(30):
        for x in (3e-4, 0.7, 2.5, 13.0):
            ref = mp.quad(lambda t: t ** n * mp.exp(-t * t - x / t), [0, 0.5, 1, 2, 4, mp.inf])
            assert abs(abramowitz_j(n, x) / float(ref) - 1) <= 1e-12


@pytest.mark.parametrize("n", [-1, 0, 1])
def test_series_and_quadrature_agree_at_switch(n):
    x = np.linspace(1.9, 2.0, 5)
    q = integral(n, x) * np.exp(-_scale(x))
    assert np.max(np.abs(series(n, x) / q - 1)) <= 1e-13


def test_derivative_relation():
    # J_n' = -J_{n-1}
    x, h = 0.8, 1e-4
    for n in (0, 1):
        d = (abramowitz_j(n, x + h) - abramowitz_j(n, x - h)) / (2 * h)
        assert abs(d + abramowitz_j(n - 1, x)) < 1e-8


def test_vectorized_and_scalar():
    x = np.array([0.0, 0.5, 3.0, 5000.0])
    v = abramowitz_j(0, x)
    assert v.shape == (4,) and v[-1] == 0.0
    assert np.isscalar(abramowitz_j(0, 0.5)) or np.ndim(abramowitz_j(0, 0.5)) == 0


def test_errors():
    with pytest.raises(ValueError):
        abramowitz_j(-1, 0.0)
    with pytest.raises(ValueError):
        abramowitz_j(0, -1.0)
    with pytest.raises(ValueError):
        abramowitz_j(2, 1.0)


class TestSplit:
    @pytest.mark.parametrize("s", [0.1, -0.1, 1e-5, 0.9, -2.2, 3.9])
    def test_recombination(self, s):
        S, L, A = j_minus1_split(s)
        v = S + L * np.log(abs(s)) + A * abs(s)
        assert abs(v / abramowitz_j(-1, abs(s)) - 1) <= 1e-12

    def test_leading_log_coefficient(self):
        # numerical limit of the log coefficient from J_{-1} alone
        x = 1e-6
        S1, L1, A1 = j_minus1_split(x)
        S2, L2, A2 = j_minus1_split(x / 2)
        num = (abramowitz_j(-1, x) - abramowitz_j(-1, x / 2)) - (A1 * x - A2 * x / 2)
        assert abs(num / np.log(2) - (-1)) < 1e-5
        assert abs(j_minus1_split(0.0)[1] + 1) < 1e-15

    def test_smooth_parts(self):
        s = np.linspace(-1, 1, 64)
        for part in j_minus1_split(s):
            c = np.polynomial.legendre.legfit(s, part, 15)
            res = np.polynomial.legendre.legval(s, c) - part
            assert np.max(np.abs(res)) <= 1e-12 * max(1.0, np.max(np.abs(part)))

    def test_even(self):
        for a, b in zip(j_minus1_split(0.7), j_minus1_split(-0.7)):
            assert a == b

    def test_radius(self):
        with pytest.raises(ValueError):
            j_minus1_split(SPLIT_RADIUS * 1.01)
