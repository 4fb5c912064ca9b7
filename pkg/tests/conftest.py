import math

import numpy as np
import pytest

from bosonbound.optics import beamsplitter_unitary


@pytest.fixture
def bs50():
    return beamsplitter_unitary(math.pi / 4)


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


def random_complex(rng, m):
    return rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))


def random_occupation(rng, n, m):
    """Uniform composition of ``n`` bosons into ``m`` modes (stars and bars)."""
    bars = np.sort(rng.choice(n + m - 1, size=m - 1, replace=False))
    edges = np.concatenate([[-1], bars, [n + m - 1]])
    return tuple(int(x) for x in np.diff(edges) - 1)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
