import numpy as np
import pytest


def random_unit_vectors(rng, n):
    x = rng.normal(size=(n, 3))
    return x / np.linalg.norm(x, axis=1)[:, None]


def random_unit_pairs(rng, n):
    p = rng.normal(size=(n, 2)) + 1j * rng.normal(size=(n, 2))
    return p / np.linalg.norm(p, axis=1)[:, None]


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# Acceptance lines are collected here and echoed in the terminal summary so
# they show up in a plain `pytest -v` run.
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
