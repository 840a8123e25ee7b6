from __future__ import annotations

import pytest

_RESULTS: dict[int, tuple[str, str, float]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion reported in the summary")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when != "call" and not (rep.when == "setup" and rep.failed):
        return
    number, title = mark.args
    _RESULTS[number] = (title, "PASS" if rep.passed else "FAIL", rep.duration)


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        title, status, dur = _RESULTS[number]
        terminalreporter.write_line(f"criterion {number:2d}  {status}  {title}  ({dur:.2f} s)")
