import time

import pytest

_ACCEPTANCE: dict[int, str] = {}


class Criterion:
    """Times one acceptance criterion and records a PASS/FAIL line for the summary."""

    def __init__(self, number: int, title: str, budget_s: float | None):
        self.number, self.title, self.budget_s = number, title, budget_s
        self.t0 = time.perf_counter()

    def finish(self, ok: bool, detail: str) -> bool:
        elapsed = time.perf_counter() - self.t0
        in_time = self.budget_s is None or elapsed < self.budget_s
        ok = ok and in_time
        budget = f" (budget {self.budget_s:g}s)" if self.budget_s else ""
        line = f"[{'PASS' if ok else 'FAIL'}] {self.number:2d}. {self.title}: {detail}; {elapsed:.2f}s{budget}"
        _ACCEPTANCE[self.number] = line
        print(line)
        return ok


@pytest.fixture
def criterion():
    return Criterion


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_ACCEPTANCE):
        terminalreporter.write_line(_ACCEPTANCE[k])
