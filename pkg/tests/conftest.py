"""Shared pytest wiring: the acceptance-criterion summary.

Tests marked @pytest.mark.criterion(number, description) are aggregated
per criterion; the terminal summary then prints exactly one PASS/FAIL
line per criterion, visible in any pytest run regardless of capture.
"""

from __future__ import annotations

import pytest

_descriptions: dict[int, str] = {}
_verdicts: dict[int, bool] = {}


def pytest_configure(config):
    config.addinivalue_line(
        "markers",
        "criterion(number, description): acceptance criterion this test feeds",
    )


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if report.when != "call":
        return
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    number, description = mark.args
    _descriptions[number] = description
    _verdicts[number] = _verdicts.get(number, True) and report.passed


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _verdicts:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_verdicts):
        verdict = "PASS" if _verdicts[number] else "FAIL"
        terminalreporter.write_line(
            f"[criterion {number}] {verdict}: {_descriptions[number]}"
        )
