import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

# criterion number -> one-line verdict, filled in by test_acceptance
ACCEPTANCE: dict[int, str] = {}


def random_spd(rng, d, eps=0.5):
    m = rng.standard_normal((d, d))
    return m.T @ m + eps * np.eye(d)


def random_banded_precision(rng, p, s0):
    """Diagonally dominant precision matrix with ``|i - j| < s0`` support."""
    omega = np.zeros((p, p))
    for k in range(1, s0):
        vals = rng.uniform(-1.0, 1.0, p - k)
        vals[np.abs(vals) < 0.05] = 0.3  # keep the pattern exact
        omega[np.arange(p - k), np.arange(k, p)] = vals
    omega = omega + omega.T
    np.fill_diagonal(omega, np.abs(omega).sum(axis=1) + rng.uniform(0.2, 1.0, p))
    return omega


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[k])
