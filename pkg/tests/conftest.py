import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

_RESULTS = []


class Recorder:
    def __call__(self, criterion, passed, detail):
        _RESULTS.append((criterion, bool(passed), detail))
        return passed


@pytest.fixture
def record():
    return Recorder()


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, passed, detail in _RESULTS:
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {criterion}: {detail}")
