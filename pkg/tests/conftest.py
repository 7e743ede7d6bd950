from __future__ import annotations

import os
import sys

from hypothesis import HealthCheck, settings, strategies as st

sys.path.insert(0, os.path.dirname(__file__))

from ecquery.boolfn import BooleanFunction  # noqa: E402

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@st.composite
def boolean_functions(draw, min_n=1, max_n=3):
    n = draw(st.integers(min_n, max_n))
    table = draw(st.lists(st.integers(0, 1), min_size=1 << n, max_size=1 << n))
    return BooleanFunction(n, tuple(table))


# ---- acceptance summary: one line per @pytest.mark.criterion test

_criteria: dict[int, tuple[str, str, float]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(k, text): numbered acceptance criterion")


def pytest_runtest_makereport(item, call):
    mark = item.get_closest_marker("criterion")
    if mark is None or call.when != "call":
        return
    k, text = mark.args
    status = "PASS" if call.excinfo is None else "FAIL"
    _criteria[k] = (status, text, call.duration)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_criteria):
        status, text, dur = _criteria[k]
        terminalreporter.write_line(f"[{status}] criterion {k:2d}: {text} ({dur:.1f}s)")
