import pytest
from hypothesis import HealthCheck, settings

from sl2dyadic.padic import make_field, q2, sqrt2_field

settings.register_profile("default", deadline=None, max_examples=200,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def F1():
    return q2(12)


@pytest.fixture(scope="session")
def F2():
    return sqrt2_field(12)


@pytest.fixture(scope="session")
def F6():
    """pi^2 = 6, so u = 3 is a unit other than 1."""
    return make_field(2, [-6, 0, 1], 12)


@pytest.fixture(scope="session")
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
