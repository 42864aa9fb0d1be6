"""Per-criterion PASS/FAIL summary for tests tagged ``@pytest.mark.criterion(n, title)``."""

from collections import OrderedDict

import pytest

_TITLES = {}
_OUTCOMES = OrderedDict()


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark is not None:
            number, title = mark.args
            _TITLES[item.nodeid] = (int(number), title)


def pytest_runtest_logreport(report):
    key = _TITLES.get(report.nodeid)
    if key is None:
        return
    # A criterion is green only if every tagged test passes in every phase.
    ok = _OUTCOMES.get(key, True)
    if report.failed or (report.when == "call" and report.skipped):
        ok = False
    _OUTCOMES[key] = ok


def pytest_terminal_summary(terminalreporter):
    if not _OUTCOMES:
        return
    terminalreporter.section("acceptance criteria")
    for (number, title), ok in sorted(_OUTCOMES.items()):
        terminalreporter.write_line(f"criterion {number} ({title}): {'PASS' if ok else 'FAIL'}")


@pytest.fixture
def criterion_log(request):
    """Print a measured value so it shows up with ``-s`` and in the captured log."""

    def log(msg):
        mark = request.node.get_closest_marker("criterion")
        tag = f"[criterion {mark.args[0]}] " if mark else ""
        print(tag + msg)

    return log
