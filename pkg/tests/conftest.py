import time

import pytest

_ACCEPTANCE_LINES: list[str] = []


class Criterion:
    """Times one acceptance criterion and records a PASS/FAIL line."""

    def __init__(self, label: str, budget_s: float):
        self.label = label
        self.budget_s = budget_s
        self.detail = ""

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.perf_counter() - self.start
        ok = exc_type is None and elapsed < self.budget_s
        status = "PASS" if ok else "FAIL"
        line = f"[{status}] {self.label} ({elapsed:.2f}s / {self.budget_s:g}s budget) {self.detail}".rstrip()
        _ACCEPTANCE_LINES.append(line)
        print(line)
        if exc_type is None:
            assert elapsed < self.budget_s, f"{self.label} exceeded runtime budget: {elapsed:.2f}s"
        return False


@pytest.fixture
def criterion():
    return Criterion


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
