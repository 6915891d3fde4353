import pytest

from eitsim.params import TWO_PI, AtomSpec, MediumSpec

# filled by tests/test_acceptance.py, printed at the end of the run
ACCEPTANCE_LINES = {}


@pytest.fixture
def atom():
    return AtomSpec()


@pytest.fixture
def bare_atom():
    return AtomSpec().without_neighbor()


@pytest.fixture
def medium():
    return MediumSpec(t0=0.5, gamma_raman=TWO_PI * 3.2e3, pump_efficiency=1.0)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
