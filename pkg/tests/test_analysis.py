import numpy as np
import pytest

from parambt.analysis import (
    CSV_SCHEMA,
    FrequencyGrid,
    bode,
    bode_deviation,
    compare_responses,
    error_report,
    frequency_response,
    hinf_grid_estimate,
    write_csv,
)
from parambt.errors import SolveFailed
from parambt.ltimodel import NumericLTI
from parambt.oracle import balance_exact, reduce_exact

from oracles import random_stable, scalar_system

LOWPASS = scalar_system(-1.0, 1.0, 1.0)


def test_lowpass_values():
    G = frequency_response(LOWPASS, [1e-12, 1.0])
    assert np.isclose(G[0, 0, 0], 1.0)
    assert np.isclose(abs(G[1, 0, 0]), 1 / np.sqrt(2))
    mag, phase = bode(G)
    assert np.isclose(mag[1, 0, 0], -10 * np.log10(2))
    assert np.isclose(phase[1, 0, 0], -45.0)


def test_response_linear_in_input(rng):
    sys = random_stable(rng, 4, 1, 1)
    scaled = NumericLTI(sys.A, 3.0 * sys.B, sys.C)
    grid = FrequencyGrid.logspace(0.1, 10, 20)
    assert np.allclose(frequency_response(scaled, grid), 3.0 * frequency_response(sys, grid))


def test_eigenvalue_on_axis_fails():
    sys = NumericLTI(np.array([[0.0, 1.0], [-1.0, 0.0]]), np.eye(2)[:, :1], np.eye(2)[:1])
    with pytest.raises(SolveFailed):
        frequency_response(sys, [1.0])


def test_grid_validation():
    with pytest.raises(ValueError):
        FrequencyGrid([1.0, 0.5])
    with pytest.raises(ValueError):
        FrequencyGrid.logspace(10.0, 1.0)
    g = FrequencyGrid.logspace()
    assert g.count == 400 and np.isclose(g.min, 1e-2) and np.isclose(g.max, 1e3)


def test_mimo_hinf(rng):
    sys = random_stable(rng, 3, 2, 2)
    G = frequency_response(sys, FrequencyGrid.logspace(0.1, 10, 5))
    assert np.isclose(hinf_grid_estimate(G), max(np.linalg.norm(g, 2) for g in G))


def test_full_order_reduction_error_vanishes(rng):
    sys = random_stable(rng, 4)
    bal = balance_exact(sys)
    rep = error_report(sys, reduce_exact(sys, 4, balanced=bal), bal.sigma, 4)
    assert rep.hinf_grid_estimate < 1e-10 and rep.upper_ok


def test_refinement_never_decreases(rng):
    for _ in range(5):
        sys = random_stable(rng, 6)
        bal = balance_exact(sys)
        red = reduce_exact(sys, 2, balanced=bal)
        coarse = error_report(sys, red, bal.sigma, 2, refine=False)
        fine = error_report(sys, red, bal.sigma, 2)
        assert fine.hinf_grid_estimate >= coarse.hinf_grid_estimate
        assert fine.upper_ok


def test_benchmark_bounds(bench_exact):
    sys = bench_exact(0.0)
    bal = balance_exact(sys)
    rep = error_report(sys, reduce_exact(sys, 4, balanced=bal), bal.sigma, 4)
    assert rep.within_bounds
    assert np.isclose(rep.lower_bound, bal.sigma[4])
    assert np.isclose(rep.upper_bound, 2 * bal.sigma[4:].sum())


def test_io_dimension_mismatch(rng):
    with pytest.raises(ValueError):
        error_report(random_stable(rng, 3, 1, 1), random_stable(rng, 2, 2, 1), [1, 1, 1], 2)


def test_bode_deviation_of_identical_models():
    G = frequency_response(LOWPASS, [0.1, 1.0])
    assert bode_deviation(G, G) == (0.0, 0.0, 0.0)


def test_compare_columns_and_csv(tmp_path):
    grid = FrequencyGrid.logspace(0.1, 10, 5)
    other = scalar_system(-2.0, 2.0, 1.0)
    cols, summary = compare_responses({"a": LOWPASS, "b": other}, LOWPASS, grid)
    assert list(cols) == ["mag_db_a", "phase_deg_a", "mag_db_b", "phase_deg_b",
                          "mag_db_exact", "phase_deg_exact"]
    assert summary["a"]["max_dev_db"] == 0.0 and summary["b"]["max_dev_db"] > 0
    path = tmp_path / "resp.csv"
    write_csv(path, "omega", grid.points, cols)
    lines = path.read_text().splitlines()
    assert lines[0] == f"# schema={CSV_SCHEMA}"
    assert lines[1].startswith("omega,mag_db_a")
    assert len(lines) == 2 + 5
