import pytest

from qlut.fxp import Domain, Tolerances
from qlut.funcspec import parse


@pytest.fixture(scope="session")
def exp_neg_instance():
    """e^-x on (0, 10) at (2^-3, 1e-7): the reference instance used across modules."""
    return parse("exp(-x)"), Domain(0.0, 10.0), Tolerances(2.0**-3, 1e-7)


# one pass/fail line per acceptance criterion, printed in the terminal summary
_CRITERIA: dict[int, list] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None or not marker.args:
        return
    number, title = marker.args
    entry = _CRITERIA.setdefault(number, [title, True, 0])
    if report.when == "call" or report.failed:
        entry[1] = entry[1] and report.passed
        if report.when == "call":
            entry[2] += 1


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, ok, cases = _CRITERIA[number]
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"criterion {number}: {status}  {title} ({cases} case{'s' * (cases != 1)})")
