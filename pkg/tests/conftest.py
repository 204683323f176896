import numpy as np
import pytest

_RESULTS = {}


class _Recorder:
    """Collects one pass/fail line per acceptance criterion."""

    def __call__(self, cid: int, title: str, passed: bool, detail: str = ""):
        _RESULTS[cid] = (title, bool(passed), detail)


@pytest.fixture
def record():
    return _Recorder()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for cid in sorted(_RESULTS):
        title, ok, detail = _RESULTS[cid]
        tr.write_line(f"[{'PASS' if ok else 'FAIL'}] {cid:2d}. {title}: {detail}")
