import pytest

ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture
def record(request):
    """Collect one summary line per acceptance criterion."""
    lines = request.config.stash.setdefault(ACCEPTANCE, [])

    def add(number, title, ok, detail=""):
        lines.append((number, title, bool(ok), detail))
        return ok

    return add


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE, [])
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, ok, detail in sorted(lines):
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {number:2d}. {title}: {detail}")
