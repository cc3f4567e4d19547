import pytest

_LINES_KEY = pytest.StashKey[list]()


@pytest.fixture
def acceptance_report(request):
    """Callable ``report(name, ok, detail)``; lines are repeated in the summary."""
    lines = request.config.stash.setdefault(_LINES_KEY, [])

    def report(name: str, ok: bool, detail: str) -> bool:
        line = f"{'PASS' if ok else 'FAIL'}  {name}: {detail}"
        lines.append(line)
        print(line)
        return ok

    return report


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_LINES_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
