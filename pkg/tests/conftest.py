"""Shared pytest hooks.

Acceptance tests call the ``criterion`` fixture to record measured values;
after the run one PASS/FAIL line per criterion is printed.
"""

import time

import pytest

_RESULTS = {}


class CriterionRecorder:
    def __init__(self, number, title):
        self.number = number
        self.title = title
        self.details = []
        self.start = time.perf_counter()
        self.end = None

    def stop(self):
        if self.end is None:
            self.end = time.perf_counter()

    def note(self, text):
        self.details.append(str(text))

    @property
    def elapsed(self):
        return (self.end or time.perf_counter()) - self.start


@pytest.fixture
def criterion(request):
    marker = request.node.get_closest_marker("criterion")
    number, title = marker.args
    rec = CriterionRecorder(number, title)
    _RESULTS[request.node.nodeid] = [rec, None]
    yield rec


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    entry = _RESULTS.get(item.nodeid)
    if entry is not None and report.when == "call":
        entry[0].stop()
        entry[1] = report.passed


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for rec, passed in sorted(_RESULTS.values(), key=lambda e: e[0].number):
        status = "PASS" if passed else "FAIL"
        detail = "; ".join(rec.details)
        tr.write_line(f"criterion {rec.number:>2} {status}  {rec.title} ({rec.elapsed:.1f}s) {detail}")
