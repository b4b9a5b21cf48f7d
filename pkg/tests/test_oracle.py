import numpy as np
import pytest

from parambt.errors import InvalidOrder
from parambt.ltimodel import NumericLTI
from parambt.oracle import balance_exact, hankel_singular_values, reduce_exact, sign_alignment

from oracles import hsv, random_stable, scalar_system


def test_scalar_already_balanced():
    bal = balance_exact(scalar_system(-1.0, np.sqrt(2), np.sqrt(2)))
    assert np.allclose(bal.Wc, 1.0) and np.allclose(bal.Wo, 1.0)
    assert np.allclose(bal.sigma, 1.0)
    assert np.allclose(bal.A, -1.0)


def test_symmetric_system(rng):
    M = rng.standard_normal((5, 5))
    A = -(M @ M.T) - np.eye(5)
    B = rng.standard_normal((5, 1))
    bal = balance_exact(NumericLTI(A, B, B.T))
    assert np.allclose(bal.Wc, bal.Wo)
    for W in (bal.Tinv @ bal.Wc @ bal.Tinv.T, bal.T.T @ bal.Wo @ bal.T):
        assert np.allclose(W, np.diag(bal.sigma), atol=1e-12)


def test_hsv_match_independent_oracle(rng):
    for n in (3, 6, 8):
        sys = random_stable(rng, n, 2, 2)
        assert np.allclose(hankel_singular_values(sys), hsv(sys), rtol=1e-8)


def test_full_order_reduction_is_balanced_realization(rng):
    sys = random_stable(rng, 4)
    bal = balance_exact(sys)
    red = reduce_exact(sys, 4, balanced=bal)
    assert np.array_equal(red.A, bal.A) and np.array_equal(red.B, bal.B)


def test_reduce_bounds(rng):
    sys = random_stable(rng, 3)
    with pytest.raises(InvalidOrder):
        reduce_exact(sys, 0)
    with pytest.raises(InvalidOrder):
        reduce_exact(sys, 4)


def test_flip_and_alignment(rng):
    bal = balance_exact(random_stable(rng, 4))
    d = np.array([1.0, -1.0, -1.0, 1.0])
    flipped = bal.flipped(d)
    assert np.array_equal(sign_alignment(bal.T, flipped.T), d)
    back = flipped.flipped(d)
    assert np.allclose(back.A, bal.A)


def test_pipeline_order_zero_agrees(bench_result, bench_exact):
    ex = balance_exact(bench_exact(0.0))
    s0 = bench_result.svd.sigma(0)
    assert np.max(np.abs(ex.sigma - s0) / s0) <= 1e-10
