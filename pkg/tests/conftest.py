import pytest

from smalltap.generators import tight_example
from smalltap.instance import validate


@pytest.fixture
def te():
    return tight_example()


@pytest.fixture
def te_idx(te):
    return validate(te)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
