import numpy as np
import pytest

from parambt.errors import InsufficientOrder
from parambt.factors import FactorSeries, factor_series, product_series
from parambt.gramians import GramianSeries, controllability_series, observability_series
from parambt.series import MatrixSeries, series_eval, series_product

from oracles import product_exact, symmetric_branch_factor


def _gram(coeffs):
    return GramianSeries("controllability", MatrixSeries(coeffs))


def test_scalar_square_root():
    # W = (1+m)^2 / 2 -> X = (1+m) / sqrt(2)
    X = factor_series(_gram([[[0.5]], [[1.0]], [[0.5]]]), 2).X
    r = 1 / np.sqrt(2)
    assert np.allclose([X[k][0, 0] for k in range(3)], [r, r, 0.0])


def test_constant_gramian(rng):
    M = rng.standard_normal((4, 4))
    W0 = M @ M.T + 4 * np.eye(4)
    X = factor_series(_gram([W0, np.zeros((4, 4)), np.zeros((4, 4))]), 2).X
    assert np.allclose(X[0], np.linalg.cholesky(W0))
    assert np.allclose(X[1], 0) and np.allclose(X[2], 0)


@pytest.mark.parametrize("kind", ["c", "o"])
def test_benchmark_reconstruction(bench_model, kind):
    fn = controllability_series if kind == "c" else observability_series
    W = fn(bench_model, 2)
    X = factor_series(W, 2)
    recon = series_product(X.X, X.X.T, 2)
    scale = np.linalg.norm(W.W[0])
    for k in range(3):
        assert np.linalg.norm(recon[k] - W.W[k]) <= 1e-9 * scale
    assert np.array_equal(X.X[0], np.tril(X.X[0]))
    for k in (1, 2):
        assert np.linalg.norm(X.X[k] - X.X[k].T) <= 1e-10 * np.linalg.norm(X.X[k])


def test_symmetric_branch_oracle(bench_model, bench_exact):
    W = controllability_series(bench_model, 2)
    X = factor_series(W, 2).X
    errs = []
    for m in (0.04, 0.02):
        s = bench_exact(m)
        from oracles import gramians as grams
        Xm = symmetric_branch_factor(grams(s.A, s.B, s.C)[0], X[0])
        errs.append(np.linalg.norm(series_eval(X, m) - Xm) / np.linalg.norm(Xm))
    assert errs[1] < 1e-5
    assert 6 < errs[0] / errs[1] < 10


def test_product_identity():
    I = FactorSeries(MatrixSeries.identity(3, 2))
    R = product_series(I, I, 2).R
    assert np.allclose(R[0], np.eye(3)) and np.allclose(R[1], 0) and np.allclose(R[2], 0)


def test_product_constant(rng):
    X = FactorSeries(MatrixSeries.constant(rng.standard_normal((3, 3)), 2))
    Y = FactorSeries(MatrixSeries.constant(rng.standard_normal((3, 3)), 2))
    R = product_series(Y, X, 2).R
    assert np.allclose(R[0], Y.X[0].T @ X.X[0]) and np.allclose(R[1], 0)


def test_product_series_against_exact(bench_result, bench_exact):
    R = bench_result.R.R
    errs = []
    for m in (0.04, 0.02):
        Re = product_exact(bench_exact, m)
        errs.append(np.linalg.norm(series_eval(R, m) - Re) / np.linalg.norm(Re))
    assert errs[1] < 1e-5
    assert 6 < errs[0] / errs[1] < 10


def test_product_order_check():
    I = FactorSeries(MatrixSeries.identity(2, 1))
    with pytest.raises(InsufficientOrder):
        product_series(I, I, 2)
