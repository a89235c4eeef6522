import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_triangular(rng, dim, radius=0.95, offdiag=0.3):
    """Upper-triangular complex matrix with spectral radius <= radius."""
    mods = radius * np.sqrt(rng.uniform(0, 1, dim))
    diag = mods * np.exp(1j * rng.uniform(0, 2 * np.pi, dim))
    upper = offdiag * (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim)))
    return np.triu(upper, 1) + np.diag(diag)


ACCEPTANCE_RESULTS = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num, status, title, detail in sorted(ACCEPTANCE_RESULTS):
        terminalreporter.write_line(f"criterion {num:2d}: {status}  {title}  [{detail}]")
