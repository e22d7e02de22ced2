import pytest

import volalab as v

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def theta0():
    return v.LogGarchParams(0.024, (0.027,), (0.016,), (0.971,))


@pytest.fixture(scope="session")
def eg0():
    return v.EgarchParams(-0.204, (0.963,), (-0.012,), (0.227,))


@pytest.fixture(scope="session")
def sample(theta0):
    """One medium log-GARCH sample shared by read-only tests."""
    return v.simulate_log_garch(theta0, v.normal(), v.SimConfig(n=3344, seed=42))


@pytest.fixture(scope="session")
def eg_sample(eg0):
    return v.simulate_egarch(eg0, v.normal(), v.SimConfig(n=3344, seed=42))
