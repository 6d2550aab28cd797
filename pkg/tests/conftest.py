import numpy as np
import pytest

from descest.model import DescriptorModel, UncertaintyWeights

_acceptance = {}
_acceptance_marks = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): exit criterion")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    marker = _acceptance_marks.get(report.nodeid)
    if marker is not None:
        _acceptance[marker] = report.outcome


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("acceptance")
        if m is not None:
            _acceptance_marks[item.nodeid] = (m.args[0], m.args[1])


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for (num, title), outcome in sorted(_acceptance.items()):
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"[{status}] criterion {num}: {title}")


@pytest.fixture
def scalar_chain():
    """F = C = H = 1, unit weights, y = (0, 1)."""
    model = DescriptorModel.constant(1.0, 1.0, 1.0, N=1)
    w = UncertaintyWeights.constant(1.0, 1.0, 1.0, N=1)
    return model, w, [np.array([0.0]), np.array([1.0])]


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
