import pytest

_ACCEPTANCE_LINES = []


@pytest.fixture
def report():
    """Record one PASS/FAIL line per acceptance criterion; printed in the terminal summary."""

    def _report(criterion: str, ok: bool, detail: str = ""):
        line = f"[{'PASS' if ok else 'FAIL'}] {criterion}" + (f" -- {detail}" if detail else "")
        _ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return _report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
