import numpy as np
import pytest

from qtrace import linalg as la


@pytest.fixture
def rng():
    return la.make_rng(2024)


def spec_matrix(kind, n, seed, **kw):
    return la.random_matrix(la.RandomEnsembleSpec(kind, n, seed=seed, **kw))


def rel_err(a, b):
    return np.max(np.abs(np.asarray(a) - np.asarray(b))) / max(1.0, np.max(np.abs(b)))


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
