import pytest

_RESULTS = {}


@pytest.fixture
def record(request):
    """Attach a measured-vs-threshold summary to the running acceptance test."""
    def _record(detail: str) -> None:
        _RESULTS.setdefault(request.node.nodeid, {})["detail"] = detail
    return _record


def pytest_runtest_logreport(report):
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        entry = _RESULTS.setdefault(report.nodeid, {})
        entry["outcome"] = report.outcome
        entry["criterion"] = dict(report.user_properties).get("criterion")


def pytest_collection_modifyitems(items):
    for item in items:
        marker = item.get_closest_marker("criterion")
        if marker is not None:
            item.user_properties.append(("criterion", marker.args))


def pytest_terminal_summary(terminalreporter):
    rows = [(v["criterion"], v) for v in _RESULTS.values() if v.get("criterion")]
    if not rows:
        return
    terminalreporter.section("acceptance criteria")
    for (number, title), entry in sorted(rows, key=lambda r: r[0][0]):
        status = "PASS" if entry.get("outcome") == "passed" else "FAIL"
        detail = entry.get("detail", "no measurement recorded")
        terminalreporter.write_line(f"{status}  criterion {number}: {title} | {detail}")
