import sys
from pathlib import Path

import pytest

sys.setrecursionlimit(50_000)

ROOT = Path(__file__).resolve().parent.parent
CORPUS = ROOT / "corpus"

_criteria: dict = {}


def pytest_runtest_logreport(report):
    marker = _criterion_of.get(report.nodeid)
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        previous = _criteria.get(marker, ("passed", None))[0]
        outcome = report.outcome if previous == "passed" else previous
        _criteria[marker] = (outcome, _titles[report.nodeid])


_criterion_of: dict = {}
_titles: dict = {}


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m is not None:
            _criterion_of[item.nodeid] = m.args[0]
            _titles[item.nodeid] = m.args[1] if len(m.args) > 1 else item.name


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        outcome, title = _criteria[n]
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"criterion {n}: {status}  {title}")


@pytest.fixture(scope="session")
def corpus_dir():
    return CORPUS
