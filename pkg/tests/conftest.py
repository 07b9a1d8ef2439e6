import pytest

from heisenberg_bounds.group import HeisenbergSpace


@pytest.fixture(scope="session")
def h1():
    return HeisenbergSpace(1)


@pytest.fixture(scope="session")
def h2():
    return HeisenbergSpace(2)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import ACCEPTANCE_LINES
    except ImportError:
        return
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
