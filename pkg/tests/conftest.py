import pytest

ACCEPTANCE = {}


@pytest.fixture
def record(request):
    """Store one acceptance verdict line, keyed by criterion number."""

    def _record(number, name, ok, detail=""):
        ACCEPTANCE[number] = (name, bool(ok), detail)
        return ok

    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        name, ok, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {number:2d}. {name}: {detail}")
