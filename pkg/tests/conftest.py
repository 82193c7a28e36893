import pytest

from orbitforge.presets import preset_path
from orbitforge.scenario import load_config_file, with_parameter


@pytest.fixture
def attitude_config():
    return load_config_file(preset_path("attitude_control"))


@pytest.fixture
def earth_config():
    return load_config_file(preset_path("earth_orbit"))


@pytest.fixture
def basic_config():
    return load_config_file(preset_path("basic"))


def short(cfg, seconds):
    return with_parameter(cfg, "simulation.simulation_time", float(seconds))


_criteria = {}


def pytest_runtest_logreport(report):
    marker = getattr(report, "criterion", None)
    if marker is None:
        return
    num, desc = marker
    ok = report.passed if report.when == "call" else not report.failed
    prev = _criteria.get(num, (desc, True))
    _criteria[num] = (desc, prev[1] and ok and not report.skipped)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    mark = item.get_closest_marker("criterion")
    if mark is not None:
        outcome.get_result().criterion = tuple(mark.args)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_criteria):
        desc, ok = _criteria[num]
        terminalreporter.write_line(f"criterion {num}: {'PASS' if ok else 'FAIL'} - {desc}")
