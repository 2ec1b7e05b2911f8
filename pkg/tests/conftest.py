import numpy as np
import pytest

from mixedcmi.bench import BenchConfig, run_bench
from mixedcmi.data import ColumnKind, Dataset
from mixedcmi.estimators import EstimatorKind

ACCEPTANCE_MODULE = "test_acceptance.py"
_acceptance_lines = []


def random_mixed(rng, n, d_cont=2, d_disc=1, d_cat=1, levels=3, rounding=1):
    """Mixed dataset with deliberate ties in the rounded/discrete columns."""
    names, kinds, arrays = [], [], []
    for j in range(d_cont):
        col = rng.normal(size=n)
        if j == 0 and rounding is not None:
            col = np.round(col, rounding)
        names.append(f"c{j}")
        kinds.append(ColumnKind.CONTINUOUS)
        arrays.append(col)
    for j in range(d_disc):
        names.append(f"d{j}")
        kinds.append(ColumnKind.DISCRETE)
        arrays.append(rng.integers(0, levels, n))
    for j in range(d_cat):
        names.append(f"k{j}")
        kinds.append(ColumnKind.CATEGORICAL)
        arrays.append(rng.choice(list("abcdefg")[:levels], n))
    return Dataset.from_arrays(names, kinds, arrays)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def paired_bench():
    """Scenario grid at n = 100 and 1000, 100 replications, shared datasets."""
    config = BenchConfig(
        n_grid=(100, 1000),
        replications=100,
        estimators=(
            EstimatorKind.PROPOSED,
            EstimatorKind.FP,
            EstimatorKind.RAVK1,
            EstimatorKind.RAVK2,
        ),
        base_seed=7,
    )
    return run_bench(config)


def pytest_runtest_logreport(report):
    if report.when == "call" and ACCEPTANCE_MODULE in report.nodeid:
        name = report.nodeid.split("::", 1)[1]
        _acceptance_lines.append(f"{'PASS' if report.passed else 'FAIL'}  {name}")


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)
