"""Shared test plumbing: the acceptance-criteria summary section.

The acceptance module appends one line per criterion to the session log;
the terminal-summary hook prints them as a block after the test run so the
pass/fail state of every criterion is readable at a glance.
"""

import pytest

_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def acceptance_log():
    return _ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in _ACCEPTANCE_LINES:
        terminalreporter.write_line(line)
