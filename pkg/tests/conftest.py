import numpy as np
import pytest

from qmac.ensemble import classical_ensemble, random_ensemble, two_basis_example

# closed-form spectrum of (|0><0| + |+><+|)/2: roots of x^2 - x + 1/8
LAM_PLUS = (2 + np.sqrt(2)) / 4
LAM_MINUS = (2 - np.sqrt(2)) / 4
H_RHO_C = float(-LAM_PLUS * np.log2(LAM_PLUS) - LAM_MINUS * np.log2(LAM_MINUS))


@pytest.fixture
def example():
    return two_basis_example()


@pytest.fixture
def classical():
    return classical_ensemble([0.5, 0.5], [0.25, 0.75])


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_ensembles(rng, count, dims=(2, 8), sizes=(1, 4)):
    for _ in range(count):
        d = int(rng.integers(dims[0], dims[1] + 1))
        na = int(rng.integers(sizes[0], sizes[1] + 1))
        nb = int(rng.integers(sizes[0], sizes[1] + 1))
        yield random_ensemble(rng, d, na, nb)


def random_density(rng, d, rank=None):
    rank = rank or d
    g = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    m = g @ g.conj().T
    return m / np.trace(m).real


ACCEPTANCE_LINES = []


@pytest.fixture
def accept():
    """Record one pass/fail line per acceptance criterion."""
    def record(number, ok, detail=""):
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}".rstrip()
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
