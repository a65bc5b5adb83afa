import pytest

from safegcd.acceptance import Acceptance

_lines = []


@pytest.fixture(scope="session")
def acceptance_results():
    results = {r.number: r for r in Acceptance().run_all()}
    _lines.extend(r.line() for r in sorted(results.values(), key=lambda r: r.number))
    return results


def pytest_terminal_summary(terminalreporter):
    if _lines:
        terminalreporter.section("acceptance criteria")
        for line in _lines:
            terminalreporter.write_line(line)
