import numpy as np
import pytest

_VERDICTS: list[str] = []


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def verdict():
    """Record a one-line acceptance verdict; printed in the terminal summary."""

    def emit(label: str, ok: bool, detail: str = "") -> bool:
        _VERDICTS.append("%-4s %s  %s" % ("PASS" if ok else "FAIL", label, detail))
        return ok

    return emit


def pytest_terminal_summary(terminalreporter):
    if _VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in _VERDICTS:
            terminalreporter.write_line(line)
