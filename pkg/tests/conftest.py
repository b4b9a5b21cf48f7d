import numpy as np
import pytest

from parambt.ltimodel import MassSpringConfig, build_mass_spring, mass_spring_numeric
from parambt.pipeline import run_pipeline


@pytest.fixture(scope="session")
def bench_cfg():
    return MassSpringConfig()


@pytest.fixture(scope="session")
def bench_model(bench_cfg):
    return build_mass_spring(bench_cfg)


@pytest.fixture(scope="session")
def bench_exact(bench_cfg):
    return lambda m: mass_spring_numeric(bench_cfg, m)


@pytest.fixture(scope="session")
def bench_result(bench_model):
    return run_pipeline(bench_model, order=2, r=4)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


# -- acceptance reporting ---------------------------------------------------

_ACCEPTANCE = {}


@pytest.fixture
def criterion(request):
    """Recorder for one acceptance criterion, numbered by the test name
    ``test_criterion_<n>_...``."""
    number = int(request.node.name.split("_")[2])

    def record(ok, detail):
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'} | {detail}"
        _ACCEPTANCE[number] = line
        print(line)
        return ok

    yield record
    if number not in _ACCEPTANCE:
        _ACCEPTANCE[number] = f"criterion {number}: FAIL | raised before completing"


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for number in sorted(_ACCEPTANCE):
            terminalreporter.write_line(_ACCEPTANCE[number])
