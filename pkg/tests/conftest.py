import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def write_csv(tmp_path):
    def _write(text, name="series.csv"):
        p = tmp_path / name
        p.write_text(text, encoding="utf-8")
        return p

    return _write


def cci_like(n=295, seed=0):
    """Smooth upward series with noise, on a CCI-like scale (thousands)."""
    r = np.random.default_rng(seed)
    t = np.arange(n)
    return 4700.0 + 17.0 * t + 60.0 * np.sin(t / 9.0) + r.normal(0, 15.0, n).cumsum() * 0.3


ACCEPTANCE_LINES = []


@pytest.fixture
def criterion(request):
    """Record one acceptance line: ``criterion(name)`` returns a timer context."""
    import time
    from contextlib import contextmanager

    @contextmanager
    def _run(name, budget_s):
        t0 = time.perf_counter()
        ok = False
        try:
            yield
            ok = True
        finally:
            dt = time.perf_counter() - t0
            within = dt < budget_s
            status = "PASS" if ok and within else "FAIL"
            note = "" if within else f" (over {budget_s:g}s budget)"
            ACCEPTANCE_LINES.append(f"{status}  {name}  [{dt:.2f}s]{note}")
        assert within, f"{name} took {dt:.2f}s, budget {budget_s}s"

    return _run


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
