"""Acceptance reporting: one PASS/FAIL line per ``criterion``-marked test group."""

import pytest

_CRITERIA = {}  # id -> {"title", "outcomes", "details"}


def _entry(item):
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return None
    cid, title = mark.args
    return _CRITERIA.setdefault(cid, {"title": title, "outcomes": [], "details": []})


@pytest.fixture
def measured(request):
    """Call with a short string to attach measured values to the criterion line."""
    entry = _entry(request.node)

    def note(text):
        if entry is not None:
            entry["details"].append(text)
    return note


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    entry = _entry(item)
    if entry is not None and (report.when == "call" or report.failed):
        entry["outcomes"].append(report.passed)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(_CRITERIA, key=lambda c: int(c[2:])):
        entry = _CRITERIA[cid]
        ok = bool(entry["outcomes"]) and all(entry["outcomes"])
        line = f"[{'PASS' if ok else 'FAIL'}] {cid} {entry['title']}"
        if entry["details"]:
            line += " | " + "; ".join(entry["details"])
        terminalreporter.write_line(line)
