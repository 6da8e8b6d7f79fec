import os

import pytest
from hypothesis import settings

# fixed example sequence by default so that runs are reproducible;
# HYPOTHESIS_PROFILE=stress searches randomly with more examples
settings.register_profile("repro", derandomize=True)
settings.register_profile("stress", max_examples=500, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "repro"))

_criteria: dict[str, str] = {}
_details: dict[str, list[str]] = {}


def pytest_addoption(parser):
    parser.addoption(
        "--ac5-smoke",
        action="store_true",
        help="run the selected-feature-count criterion on 25 datasets instead of 100",
    )


@pytest.fixture
def criterion_detail(request):
    """Append a line of measured values to the criterion summary."""
    marker = request.node.get_closest_marker("criterion")
    lines = _details.setdefault(marker.args[0], [])
    return lines.append


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    name = marker.args[0]
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        status = "PASS" if report.passed else ("SKIP" if report.skipped else "FAIL")
        # a criterion spread over several tests fails if any part fails
        if _criteria.get(name) != "FAIL":
            _criteria[name] = status


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_criteria):
        terminalreporter.write_line(f"{_criteria[name]}  {name}")
        for line in _details.get(name, []):
            terminalreporter.write_line(f"      {line}")
