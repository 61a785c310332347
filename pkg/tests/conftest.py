import pytest

_results = {}


def pytest_runtest_logreport(report):
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        crit = report.user_properties and dict(report.user_properties).get("criterion")
        if crit:
            prev = _results.get(crit, (True, ""))
            _results[crit] = (prev[0] and report.outcome == "passed", dict(report.user_properties)["title"])


@pytest.fixture
def criterion(request, record_property):
    marker = request.node.get_closest_marker("acceptance")
    number, title = marker.args
    record_property("criterion", number)
    record_property("title", title)
    return number


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_results):
        ok, title = _results[number]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {number}: {title}")
