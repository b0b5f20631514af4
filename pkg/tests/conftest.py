import pytest

from infospace.quantum import PhysicalParams, oscillator_levels

# filled by test_acceptance.py, printed after the run
ACCEPTANCE_LINES: dict[int, str] = {}


@pytest.fixture(scope="session")
def ref_params():
    return PhysicalParams(m=8.0, k=8.0, hbar=1.0)


@pytest.fixture(scope="session")
def ref_levels(ref_params):
    return oscillator_levels(ref_params, 30)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
