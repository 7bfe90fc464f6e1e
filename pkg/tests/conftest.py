from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_RESULTS: dict[int, list[tuple[str, bool, str]]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(k): acceptance criterion number k")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when != "call" or report.skipped and not hasattr(report, "wasxfail"):
        return
    ok = report.passed and not hasattr(report, "wasxfail")
    detail = dict(item.user_properties).get("detail", "")
    _RESULTS.setdefault(marker.args[0], []).append((item.name, ok, detail))


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_RESULTS):
        parts = _RESULTS[k]
        status = "PASS" if all(ok for _, ok, _ in parts) else "FAIL"
        terminalreporter.write_line(f"criterion {k}: {status}")
        for name, ok, detail in parts:
            terminalreporter.write_line(f"    {'ok  ' if ok else 'FAIL'} {name} {detail}")
