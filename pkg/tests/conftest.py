import numpy as np
import pytest

from sdcmetrics.data import Dataset

_ACCEPTANCE_LINES = []


def correlated(n, m, rho, seed):
    corr = np.full((m, m), rho)
    np.fill_diagonal(corr, 1.0)
    z = np.random.default_rng(seed).standard_normal((n, m))
    return Dataset.from_array(z @ np.linalg.cholesky(corr).T)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def corr_data():
    return correlated(300, 4, 0.7, seed=11)


@pytest.fixture(scope="session")
def acceptance_log():
    return _ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
