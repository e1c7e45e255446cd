"""Shared test configuration.

Tests marked with @pytest.mark.criterion("...") are the acceptance gate;
after a run their outcomes are summarized one line per criterion.
"""

import pytest

_outcomes: dict[str, bool] = {}


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "criterion(name): names an acceptance criterion checked by this test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    name = marker.args[0]
    if report.when == "call":
        _outcomes[name] = report.passed
    elif report.failed:  # setup or teardown crash counts as a failure
        _outcomes[name] = False


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed in _outcomes.items():
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {name}")
