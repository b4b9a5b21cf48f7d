import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import linalg as sla

from parambt.errors import (
    NotPositiveDefinite,
    NotSymmetric,
    RankDeficient,
    ShapeMismatch,
    SingularInput,
    UnstableOrIllConditioned,
)
from parambt.gramians import controllability_series, observability_series
from parambt.linalg import (
    LyapunovSolver,
    cholesky,
    lyapunov_residual,
    solve_linear,
    solve_lyapunov,
    svd_full,
)
from parambt.svd_perturb import ZerothSVD, sigma_first


# -- solve_linear -----------------------------------------------------------

def test_solve_identity():
    b = np.array([1.0, -2.0, 3.5])
    assert np.allclose(solve_linear(np.eye(3), b), b)


def test_solve_diagonal():
    assert np.allclose(solve_linear(np.diag([2.0, 4.0]), [2.0, 8.0]), [1.0, 2.0])


def test_solve_matrix_rhs_keeps_shape():
    Z = solve_linear(np.diag([2.0, 4.0]), np.ones((2, 3)))
    assert Z.shape == (2, 3)


def test_solve_rejects_singular():
    with pytest.raises(RankDeficient):
        solve_linear(np.array([[1.0, 1.0], [1.0, 1.0]]), [1.0, 2.0])


def test_solve_rejects_wide():
    with pytest.raises(ShapeMismatch):
        solve_linear(np.ones((2, 3)), [1.0, 2.0])


def test_bordered_system_residual(bench_result):
    # the 21 x 20 bordered matrix for the first singular vector correction
    R0, R1 = bench_result.R.R[0], bench_result.R.R[1]
    z = ZerothSVD.of(R0)
    i = 3
    u0, v0, s0 = z.u(i), z.v(i), z.sigma[i]
    s1 = sigma_first(R1, u0, v0)
    Q1 = 2 * s0 * s1 * u0 - R0 @ (R1.T @ u0) - s0 * (R1 @ v0)
    M = np.vstack((z.RRt - s0 ** 2 * np.eye(20), u0[None, :]))
    rhs = np.concatenate((Q1, [0.0]))
    assert M.shape == (21, 20)
    Z = solve_linear(M, rhs)
    assert np.linalg.norm(M @ Z - rhs) <= 1e-10 * np.linalg.norm(rhs)


# -- cholesky ---------------------------------------------------------------

def test_cholesky_identity():
    assert np.array_equal(cholesky(np.eye(4)), np.eye(4))


def test_cholesky_2x2():
    assert np.allclose(cholesky([[4.0, 2.0], [2.0, 5.0]]), [[2.0, 0.0], [1.0, 2.0]])


def test_cholesky_benchmark_gramian(bench_model):
    W = controllability_series(bench_model, 0).W[0]
    L = cholesky(W)
    assert np.allclose(L, np.tril(L))
    assert np.linalg.norm(L @ L.T - W) <= 1e-12 * np.linalg.norm(W)


def test_cholesky_rejects_indefinite():
    with pytest.raises(NotPositiveDefinite):
        cholesky([[1.0, 2.0], [2.0, 1.0]])


def test_cholesky_rejects_asymmetric():
    with pytest.raises(NotSymmetric):
        cholesky([[2.0, 1.0], [0.0, 2.0]])


# -- svd_full ---------------------------------------------------------------

def test_svd_identity():
    U, s, V = svd_full(np.eye(3))
    assert np.allclose(s, 1.0)
    assert np.allclose(U, np.eye(3)) and np.allclose(V, np.eye(3))


def test_svd_diagonal():
    _, s, _ = svd_full(np.diag([1.0, 3.0, 2.0]))
    assert np.allclose(s, [3.0, 2.0, 1.0])


def test_svd_sign_convention(rng):
    U, _, _ = svd_full(rng.standard_normal((5, 5)))
    for j in range(5):
        assert U[np.argmax(np.abs(U[:, j])), j] > 0


def test_svd_rejects_singular():
    with pytest.raises(SingularInput):
        svd_full(np.array([[1.0, 2.0], [2.0, 4.0]]))


def test_svd_benchmark_matches_numpy(bench_model):
    X = cholesky(controllability_series(bench_model, 0).W[0])
    Y = cholesky(observability_series(bench_model, 0).W[0])
    R0 = Y.T @ X
    U, s, V = svd_full(R0)
    assert s.shape == (20,) and np.all(np.diff(s) < 0)
    assert np.linalg.norm(U * s @ V.T - R0) <= 1e-12 * np.linalg.norm(R0)
    assert np.allclose(s, np.linalg.svd(R0, compute_uv=False), rtol=1e-10)


@settings(max_examples=40, deadline=None)
@given(n=st.integers(1, 7), seed=st.integers(0, 2 ** 32 - 1))
def test_svd_property_random(n, seed):
    R = np.random.default_rng(seed).standard_normal((n, n))
    ref = np.linalg.svd(R, compute_uv=False)
    if ref[-1] < 1e-8 * ref[0]:
        return
    U, s, V = svd_full(R)
    assert np.allclose(s, ref, rtol=1e-10, atol=0)
    assert np.allclose(U.T @ U, np.eye(n), atol=1e-12)
    assert np.allclose(V.T @ V, np.eye(n), atol=1e-12)
    assert np.linalg.norm(U * s @ V.T - R) <= 1e-12 * np.linalg.norm(R)


# -- Lyapunov ---------------------------------------------------------------

def test_lyapunov_scalar():
    assert np.allclose(solve_lyapunov(np.array([[-1.0]]), np.array([[2.0]])), 1.0)


def test_lyapunov_negative_identity(rng):
    S = rng.standard_normal((4, 4))
    S = S + S.T
    assert np.allclose(solve_lyapunov(-np.eye(4), S), S / 2)


def test_lyapunov_benchmark_residual(bench_exact):
    s = bench_exact(0.0)
    W = solve_lyapunov(s.A, s.B @ s.B.T)
    assert lyapunov_residual(s.A, W, s.B @ s.B.T) <= 1e-10
    ref = sla.solve_continuous_lyapunov(s.A, -s.B @ s.B.T)
    assert np.linalg.norm(W - ref) <= 1e-9 * np.linalg.norm(ref)


def test_lyapunov_rejects_marginal():
    # eigenvalues +-i sum to zero
    with pytest.raises(UnstableOrIllConditioned):
        LyapunovSolver(np.array([[0.0, 1.0], [-1.0, 0.0]]))


def test_lyapunov_rejects_asymmetric_rhs():
    with pytest.raises(NotSymmetric):
        solve_lyapunov(-np.eye(2), np.array([[1.0, 1.0], [0.0, 1.0]]))


def test_lyapunov_solver_reuse(rng):
    A = rng.standard_normal((5, 5)) - 6 * np.eye(5)
    solver = LyapunovSolver(A)
    for _ in range(3):
        Q = rng.standard_normal((5, 5))
        Q = Q @ Q.T
        W = solver.solve(Q)
        assert np.allclose(W, sla.solve_continuous_lyapunov(A, -Q), atol=1e-11)


@settings(max_examples=40, deadline=None)
@given(n=st.integers(1, 6), seed=st.integers(0, 2 ** 32 - 1))
def test_lyapunov_property_random_stable(n, seed):
    g = np.random.default_rng(seed)
    M = g.standard_normal((n, n))
    A = M - (np.max(np.abs(np.linalg.eigvals(M))) + 1.0) * np.eye(n)
    Q = g.standard_normal((n, n))
    Q = Q @ Q.T
    W = solve_lyapunov(A, Q)
    assert np.array_equal(W, W.T)
    assert lyapunov_residual(A, W, Q) <= 1e-12
    ref = sla.solve_continuous_lyapunov(A, -Q)
    assert np.linalg.norm(W - ref) <= 1e-9 * np.linalg.norm(ref)
