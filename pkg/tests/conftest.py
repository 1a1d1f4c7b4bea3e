import pytest

from symloc.instances import InstanceSpec, bundled_names, bundled_text, generate
from symloc.parser import parse_model

_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by the test")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    marker = _markers.get(report.nodeid)
    if marker is None:
        return
    number, title = marker
    prev = _criteria.get(number, (title, True))
    _criteria[number] = (title, prev[1] and report.passed)


_markers = {}


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m is not None:
            _markers[item.nodeid] = m.args


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, ok = _criteria[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {title}")


@pytest.fixture(scope="session")
def bundled():
    return {name: parse_model(bundled_text(name), file=f"{name}.mop") for name in bundled_names()}


def gen(problem, seed=0, **params):
    return parse_model(generate(InstanceSpec(problem, params, seed)))


@pytest.fixture
def tsp4(bundled):
    return bundled["tsp4"]


@pytest.fixture
def tsp4_sym(bundled):
    return bundled["tsp4_sym"]


@pytest.fixture
def knapsack3(bundled):
    return bundled["knapsack3"]


@pytest.fixture
def cnp_k3(bundled):
    return bundled["cnp_k3"]
