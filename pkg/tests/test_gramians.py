import numpy as np
import pytest

import parambt.gramians as gmod
from parambt.errors import InsufficientOrder
from parambt.gramians import controllability_series, observability_series, power_residuals
from parambt.ltimodel import ParametricLTI
from parambt.series import MatrixSeries, series_eval

from oracles import gramians, random_parametric


def _scalar(a, b, c):
    return ParametricLTI.from_coefficients(*([np.array([[x]]) for x in v] for v in (a, b, c)))


def test_scalar_controllability():
    # A = -1, B = 1 + m: W(m) = (1 + m)^2 / 2
    W = controllability_series(_scalar([-1, 0, 0], [1, 1, 0], [1, 0, 0]), 2).W
    assert np.allclose([W[k][0, 0] for k in range(3)], [0.5, 1.0, 0.5])


def test_scalar_observability():
    W = observability_series(_scalar([-1, 0, 0], [1, 0, 0], [1, 1, 0]), 2).W
    assert np.allclose([W[k][0, 0] for k in range(3)], [0.5, 1.0, 0.5])


def test_parameter_free_system(rng):
    sys = random_parametric(rng, 5, order=0)
    const = ParametricLTI(MatrixSeries.constant(sys.A[0], 2), MatrixSeries.constant(sys.B[0], 2),
                          MatrixSeries.constant(sys.C[0], 2))
    for fn in (controllability_series, observability_series):
        W = fn(const, 2).W
        assert np.allclose(W[1], 0) and np.allclose(W[2], 0)


def test_coefficients_symmetric(bench_model):
    for fn in (controllability_series, observability_series):
        for W in fn(bench_model, 2).W:
            assert np.linalg.norm(W - W.T) <= 1e-10 * np.linalg.norm(W)
    W0 = controllability_series(bench_model, 0).W[0]
    assert np.all(np.linalg.eigvalsh(W0) > 0)


@pytest.mark.parametrize("kind", ["c", "o"])
def test_benchmark_third_order_convergence(bench_model, bench_exact, kind):
    fn = controllability_series if kind == "c" else observability_series
    W = fn(bench_model, 2).W
    errs = []
    for m in (0.04, 0.02):
        s = bench_exact(m)
        ref = gramians(s.A, s.B, s.C)[0 if kind == "c" else 1]
        errs.append(np.linalg.norm(series_eval(W, m) - ref) / np.linalg.norm(ref))
    assert errs[1] < 1e-5
    assert 6 < errs[0] / errs[1] < 10


def test_power_residuals_small(bench_model):
    for fn in (controllability_series, observability_series):
        g = fn(bench_model, 2)
        assert max(power_residuals(bench_model, g)) < 1e-12


def test_only_leading_coefficient_is_factored(bench_model, monkeypatch):
    seen = []
    real = gmod.LyapunovSolver

    def spy(A, tol):
        seen.append(np.array(A))
        return real(A, tol)

    monkeypatch.setattr(gmod, "LyapunovSolver", spy)
    controllability_series(bench_model, 2)
    observability_series(bench_model, 2)
    assert len(seen) == 2
    assert np.array_equal(seen[0], bench_model.A[0])
    assert np.array_equal(seen[1], bench_model.A[0].T)


def test_order_exceeding_model(rng):
    with pytest.raises(InsufficientOrder):
        controllability_series(random_parametric(rng, 3, order=1), 2)


def test_random_systems_agree_with_oracle(rng):
    for n in (2, 4, 6):
        sys = random_parametric(rng, n, inputs=2, outputs=2)
        Wc = controllability_series(sys, 2).W
        m = 1e-3
        s = sys.at(m)
        ref = gramians(s.A, s.B, s.C)[0]
        assert np.linalg.norm(series_eval(Wc, m) - ref) <= 1e-6 * np.linalg.norm(ref)
