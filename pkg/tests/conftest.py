"""Shared fixtures; collects the acceptance lines for the terminal summary."""
import pytest

ACCEPTANCE_LINES = []


@pytest.fixture
def criterion():
    """Record ``[PASS|FAIL] criterion N: detail`` and return the verdict."""

    def record(number, ok, detail):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
