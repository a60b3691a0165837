from pathlib import Path

import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def fixtures_dir():
    return FIXTURES


# one line per acceptance criterion ---------------------------------------------------

_CRITERIA: dict = {}


def _criterion(nodeid: str):
    if "test_acceptance.py::test_c" not in nodeid:
        return None
    name = nodeid.split("::", 1)[1]
    return int(name[len("test_c") : len("test_c") + 2])


def pytest_runtest_logreport(report):
    number = _criterion(report.nodeid)
    if number is None:
        return
    entry = _CRITERIA.setdefault(number, {"passed": 0, "failed": [], "xfailed": []})
    if hasattr(report, "wasxfail"):
        if report.when == "call" or report.skipped:
            entry["xfailed"].append(report.nodeid.split("::", 1)[1])
    elif report.failed:
        entry["failed"].append(report.nodeid.split("::", 1)[1])
    elif report.when == "call" and report.passed:
        entry["passed"] += 1


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        entry = _CRITERIA[number]
        bad = entry["failed"] + entry["xfailed"]
        status = "FAIL" if bad else "PASS"
        line = f"criterion {number:2d}: {status} ({entry['passed']} passed"
        if entry["xfailed"]:
            line += f", known failure: {', '.join(entry['xfailed'])}"
        if entry["failed"]:
            line += f", failed: {', '.join(entry['failed'])}"
        terminalreporter.write_line(line + ")")
