import pytest
from hypothesis import HealthCheck, settings

from ttstar.semantics import arith_model
from ttstar.syntax import default_signature

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def sig():
    return default_signature()


@pytest.fixture(scope="session")
def arith7():
    return arith_model(7)


ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
