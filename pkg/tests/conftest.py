import pytest

import _cases

ACCEPTANCE = {}


@pytest.fixture(scope="session")
def ica():
    return _cases.case("ica")


@pytest.fixture(scope="session")
def csf():
    return _cases.case("csf")


@pytest.fixture(scope="session")
def acceptance_log():
    return ACCEPTANCE


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[key])
