from __future__ import annotations

import pytest

_RESULTS: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion number and short title")


@pytest.fixture
def record(request):
    """Attach measured values to the acceptance line of the current test."""
    marker = request.node.get_closest_marker("criterion")
    n = marker.args[0]
    entry = _RESULTS.setdefault(n, {"title": marker.args[1], "outcome": None, "notes": []})
    return entry["notes"].append


def pytest_runtest_logreport(report):
    criterion = getattr(report, "_criterion", None)
    if criterion is None or report.when == "teardown":
        return
    if report.when == "setup" and report.passed:
        return
    n, title = criterion
    entry = _RESULTS.setdefault(n, {"title": title, "outcome": None, "notes": []})
    entry["outcome"] = report.passed if entry["outcome"] is None else (entry["outcome"] and report.passed)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        outcome.get_result()._criterion = (marker.args[0], marker.args[1])


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_RESULTS):
        entry = _RESULTS[n]
        status = {True: "PASS", False: "FAIL", None: "NOT RUN"}[entry["outcome"]]
        notes = "; ".join(entry["notes"])
        terminalreporter.write_line(f"criterion {n} [{status}] {entry['title']}" + (f": {notes}" if notes else ""))
