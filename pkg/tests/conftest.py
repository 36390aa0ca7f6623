import time
from contextlib import contextmanager

import pytest

from causanet import puzzles

# criterion number -> (passed, seconds, title)
_ACCEPTANCE: dict[int, tuple[bool, float, str]] = {}


@contextmanager
def _record(number: int, title: str, limit: float):
    start = time.perf_counter()
    ok = False
    try:
        yield
        elapsed = time.perf_counter() - start
        assert elapsed < limit, f"took {elapsed:.2f}s, limit {limit}s"
        ok = True
    finally:
        elapsed = time.perf_counter() - start
        _ACCEPTANCE[number] = (ok, elapsed, title)
        print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number:2d}: {title} ({elapsed:.2f}s)")


@pytest.fixture
def criterion():
    return _record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        ok, elapsed, title = _ACCEPTANCE[n]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {n:2d}  {title}  ({elapsed:.2f}s)")


@pytest.fixture
def two_stage():
    return puzzles.two_stage_net()


@pytest.fixture
def job_market():
    return puzzles.job_market_net()
