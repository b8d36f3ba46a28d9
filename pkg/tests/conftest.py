import time
from contextlib import contextmanager
from dataclasses import dataclass

import pytest

_LINES = []


@dataclass
class Criterion:
    number: int
    title: str
    limit: float
    ok: bool = False
    detail: str = ""
    elapsed: float = 0.0

    @property
    def in_time(self) -> bool:
        return self.elapsed < self.limit

    def line(self) -> str:
        flag = "PASS" if self.ok and self.in_time else "FAIL"
        timing = f"{self.elapsed:.2f}s / {self.limit:g}s"
        return f"{flag} criterion {self.number}: {self.title} [{self.detail}] ({timing})"


@pytest.fixture
def criterion():
    """Time a block, record its outcome and print one PASS/FAIL line."""

    @contextmanager
    def run(number, title, limit):
        rec = Criterion(number, title, limit)
        start = time.perf_counter()
        try:
            yield rec
        finally:
            rec.elapsed = time.perf_counter() - start
            _LINES.append(rec.line())
            print(rec.line())

    return run


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_LINES, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
