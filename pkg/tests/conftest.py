import pytest

_LINES = {}


@pytest.fixture
def acceptance():
    """Record the verdict of one acceptance criterion for the summary."""

    def record(name, ok, detail):
        _LINES[name] = f"{name} {'PASS' if ok else 'FAIL'}: {detail}"
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _LINES:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_LINES, key=lambda s: int(s[1:])):
        terminalreporter.write_line(_LINES[name])
