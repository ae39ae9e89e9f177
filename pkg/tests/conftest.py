import numpy as np
import pytest

from goram.mpc import Session

# acceptance criterion lines, printed once at the end of the run
CRITERIA: dict[int, tuple[str, bool, str]] = {}


def record_criterion(num: int, title: str, ok: bool, detail: str = ""):
    CRITERIA[num] = (title, ok, detail)


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(CRITERIA):
        title, ok, detail = CRITERIA[num]
        line = f"criterion {num}: {'PASS' if ok else 'FAIL'} - {title}"
        if detail:
            line += f" ({detail})"
        terminalreporter.write_line(line)


@pytest.fixture
def sess():
    return Session(1234)


@pytest.fixture
def rng():
    return np.random.default_rng(99)
