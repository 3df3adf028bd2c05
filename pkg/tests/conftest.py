import numpy as np
import pytest

from gdakit.datagen import COVS, MEANS

SIGMA1 = COVS[0]
MU1 = MEANS[0]


def random_spd(rng, d, jitter=1.0):
    m = rng.standard_normal((d, d))
    return m.T @ m + jitter * np.eye(d)


def random_rotation(rng, d):
    q, r = np.linalg.qr(rng.standard_normal((d, d)))
    return q * np.sign(np.diag(r))


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


# one line per acceptance criterion, echoed at the end of the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
