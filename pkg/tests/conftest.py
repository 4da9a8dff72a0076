import numpy as np
import pytest

_criteria: dict[str, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, text): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, text = marker.args
    key = f"{number}:{item.name}"
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _criteria[key] = ("PASS" if report.passed else "FAIL", f"criterion {number:>2}: {text}")


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_criteria, key=lambda k: (int(k.split(":")[0]), k)):
        status, line = _criteria[key]
        terminalreporter.write_line(f"[{status}] {line}")


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def ar1_acov(phi, max_lag, sigma2=1.0):
    return sigma2 * phi ** np.arange(max_lag + 1) / (1.0 - phi**2)


def ma1_acov(theta, max_lag, sigma2=1.0):
    g = np.zeros(max_lag + 1)
    g[0] = sigma2 * (1.0 + theta**2)
    if max_lag >= 1:
        g[1] = sigma2 * theta
    return g
