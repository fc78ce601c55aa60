import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rcip.linalg import (GmresError, SingularMatrixError, gmres_solve, inv, kron_linear_solve,
                         lemma2_lhs, lemma2_rhs, lemma_lhs, lemma_rhs, lu_solve)


def crandn(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def well_conditioned(rng, n):
    return np.eye(n) * (n ** 0.5 * 3) + crandn(rng, n, n)


def rel(a, b):
    return np.linalg.norm(a - b) / np.linalg.norm(b)


class TestLuSolve:
    def test_identity(self, rng):
        B = crandn(rng, 4, 3)
        assert np.array_equal(lu_solve(np.eye(4), B), B)

    def test_diagonal(self):
        X = lu_solve(np.diag([2.0, 4.0]), np.array([[2.0], [8.0]]))
        np.testing.assert_allclose(X, [[1.0], [2.0]], rtol=0, atol=1e-15)

    def test_forward_multiply_oracle(self, rng):
        A = well_conditioned(rng, 8)
        X0 = crandn(rng, 8, 2)
        assert rel(lu_solve(A, A @ X0), X0) <= 1e-12

    def test_residual_bound(self, rng):
        for _ in range(5):
            A = well_conditioned(rng, 30)
            B = crandn(rng, 30, 4)
            assert np.linalg.cond(A) < 1e3
            assert rel(A @ lu_solve(A, B), B) <= 1e-13

    def test_singular_reports_pivot(self):
        A = np.array([[1.0, 2.0], [2.0, 4.0]])
        with pytest.raises(SingularMatrixError) as exc:
            lu_solve(A, np.ones(2))
        assert exc.value.pivot is not None and exc.value.pivot < 1e-12

    def test_rejects_non_square(self):
        with pytest.raises(ValueError):
            lu_solve(np.ones((2, 3)), np.ones(2))

    def test_inv(self, rng):
        A = well_conditioned(rng, 6)
        assert rel(inv(A) @ A, np.eye(6)) < 1e-14


class TestGmres:
    def test_identity_one_iteration(self, rng):
        b = crandn(rng, 10)
        res = gmres_solve(lambda x: x, b)
        assert res.iters == 1
        assert rel(res.x, b) < 1e-15

    @pytest.mark.parametrize("n", [16, 64, 128])
    def test_matches_lu(self, rng, n):
        A = well_conditioned(rng, n)
        b = crandn(rng, n)
        res = gmres_solve(lambda x: A @ x, b)
        assert rel(res.x, lu_solve(A, b).ravel()) <= 1e-12
        assert res.residual_history[0] == 1.0

    def test_zero_rhs_rejected(self):
        with pytest.raises(ValueError):
            gmres_solve(lambda x: x, np.zeros(3))

    def test_max_iter_error_carries_residual(self, rng):
        A = well_conditioned(rng, 40)
        with pytest.raises(GmresError) as exc:
            gmres_solve(lambda x: A @ x, crandn(rng, 40), max_iter=3)
        assert 0 < exc.value.best_residual < 1

    def test_stagnation_returns_best_iterate(self, rng):
        # unattainable tolerance: the guard must stop near machine precision
        A = well_conditioned(rng, 50)
        b = crandn(rng, 50)
        res = gmres_solve(lambda x: A @ x, b, tol=1e-30)
        assert res.stagnated or res.iters == 50
        assert rel(A @ res.x, b) < 1e-13


class TestKron:
    def test_zero_coefficients(self, rng):
        D = crandn(rng, 5, 4)
        assert rel(kron_linear_solve(np.zeros((5, 5)), np.zeros((4, 4)), D), D) < 1e-15

    def test_scalar_fixed_point(self, rng):
        D = crandn(rng, 4, 4)
        X = kron_linear_solve(0.3 * np.eye(4), np.eye(4), D)
        assert rel(X, D / 0.7) < 1e-14

    def test_against_iteration(self, rng):
        n = 12
        C1 = crandn(rng, n, n)
        C2 = crandn(rng, n, n)
        C1 *= 0.45 / np.linalg.norm(C1, 2)
        C2 *= 0.45 / np.linalg.norm(C2, 2)
        D = crandn(rng, n, n)
        X = kron_linear_solve(C1, C2, D)
        Y = np.zeros_like(D)
        for _ in range(200):
            Y = C1 @ Y @ C2 + D
        assert rel(X, Y) <= 1e-12
        assert rel(X - C1 @ X @ C2, D) <= 1e-12

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            kron_linear_solve(np.eye(2), np.eye(3), np.ones((3, 3)))


class TestLemma:
    def test_b_zero(self, rng):
        A = well_conditioned(rng, 6)
        U, V = crandn(rng, 2, 6), crandn(rng, 6, 2)
        ref = U @ inv(A) @ V
        assert rel(lemma_lhs(U, A, V, np.zeros((2, 2))), ref) < 1e-13
        assert rel(lemma_rhs(U, A, V, np.zeros((2, 2))), ref) < 1e-13

    def test_square_identity_maps(self, rng):
        A = well_conditioned(rng, 4)
        B = crandn(rng, 4, 4)
        ref = inv(A + B)
        I = np.eye(4)
        assert rel(lemma_lhs(I, A, I, B), ref) < 1e-13
        assert rel(lemma_rhs(I, A, I, B), ref) < 1e-13

    def test_random_instance(self, rng):
        A = well_conditioned(rng, 8)
        B = crandn(rng, 3, 3)
        U, V = crandn(rng, 3, 8), crandn(rng, 8, 3)
        assert rel(lemma_lhs(U, A, V, B), lemma_rhs(U, A, V, B)) <= 1e-12
        assert rel(lemma2_lhs(U, A, V, B), lemma2_rhs(U, A, V, B)) <= 1e-12


@settings(max_examples=100, deadline=None)
@given(m=st.integers(4, 12), data=st.data(), seed=st.integers(0, 2 ** 32 - 1))
def test_lemma_property(m, data, seed):
    n = data.draw(st.integers(1, m))
    rng = np.random.default_rng(seed)
    A = well_conditioned(rng, m)
    B = crandn(rng, n, n)
    U, V = crandn(rng, n, m), crandn(rng, m, n)
    assert rel(lemma_lhs(U, A, V, B), lemma_rhs(U, A, V, B)) <= 1e-11
    assert rel(lemma2_lhs(U, A, V, B), lemma2_rhs(U, A, V, B)) <= 1e-11
