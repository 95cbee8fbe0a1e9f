import pytest

from lunarhab.config import ScenarioConfig
from lunarhab.scenario import run_scenario


@pytest.fixture(scope="session")
def reference_config() -> ScenarioConfig:
    return ScenarioConfig()


@pytest.fixture(scope="session")
def reference_run(reference_config):
    return run_scenario(reference_config)


# Acceptance tests carry @pytest.mark.criterion(n, title); the terminal
# summary prints one PASS/FAIL line per criterion.
_criteria: dict[int, tuple[str, bool]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by the test")


def pytest_runtest_logreport(report):
    marker = getattr(report, "criterion", None)
    if marker is None or report.when not in ("setup", "call"):
        return
    number, title = marker
    ok = _criteria.get(number, (title, True))[1] and report.passed
    if report.when == "setup" and report.passed:
        _criteria.setdefault(number, (title, True))
        return
    _criteria[number] = (title, ok)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        outcome.get_result().criterion = tuple(marker.args)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, ok = _criteria[number]
        terminalreporter.write_line(f"criterion {number} {title}: {'PASS' if ok else 'FAIL'}")
