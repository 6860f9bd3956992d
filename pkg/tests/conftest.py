import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

_LINES = pytest.StashKey()


@pytest.fixture
def criterion(request):
    """Record one pass/fail line; the lines are repeated in the terminal summary."""
    lines = request.config.stash.setdefault(_LINES, [])

    def record(n, ok, text):
        line = f"{'PASS' if ok else 'FAIL'} criterion {n}: {text}"
        lines.append(line)
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
