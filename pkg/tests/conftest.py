from pathlib import Path

import numpy as np
import pytest

from tristream.graph import read_stream

DATA = Path(__file__).parent / "data"

# exact counts of data/fix30.txt, cross-checked against oracles.counts
FIX30_DELTA = 10
FIX30_COUNTS = [7, 5, 4, 3, 5, 9, 5, 3]

_results: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def fix30():
    return read_stream(DATA / "fix30.txt")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def criterion(request):
    """Record the outcome of an acceptance criterion for the summary table."""
    number, title = request.node.get_closest_marker("acceptance").args
    state = {"detail": ""}
    yield state
    failed = getattr(request.node, "_failed", True)
    _results[number] = (not failed, f"{title}{': ' + state['detail'] if state['detail'] else ''}")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item._failed = rep.failed


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_results):
        ok, text = _results[number]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {number:>2}. {text}")
