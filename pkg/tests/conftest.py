import pytest

from nsac.potential import Potential
from nsac.profiles import build_profiles

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def table():
    return build_profiles(Potential.standard(), lambda0=1.0 / 3.0)


@pytest.fixture(scope="session")
def table0():
    return build_profiles(Potential.standard(), lambda0=0.0)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
