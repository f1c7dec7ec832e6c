import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from qclab import beltrami

settings.register_profile("qclab", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("qclab")


@pytest.fixture(scope="session")
def constant_solution_256():
    g = beltrami.ComplexGrid.square(256)
    return beltrami.solve_principal(beltrami.mu_constant(g, 1 / 3), 1e-10)


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


# one line per acceptance criterion, filled in by tests/test_acceptance.py
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
