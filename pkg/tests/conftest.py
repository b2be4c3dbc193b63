import numpy as np
import pytest

from eyestate import center, make_synthetic_recording, remove_outliers


@pytest.fixture(scope="session")
def synthetic_rec():
    return make_synthetic_recording(seed=0)


@pytest.fixture(scope="session")
def prepared_rec(synthetic_rec):
    cleaned, _ = remove_outliers(synthetic_rec, 10.0)
    return center(cleaned)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


_CRITERIA = {}


@pytest.fixture
def criterion(request):
    """Mutable detail string shown next to the criterion's pass/fail line."""
    state = {"detail": ""}
    request.node.criterion_state = state
    return state


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or rep.when == "teardown":
        return
    if rep.when == "setup" and rep.passed:
        return
    number, title = marker.args
    detail = getattr(item, "criterion_state", {}).get("detail", "")
    _CRITERIA[number] = (title, rep.passed, detail)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, passed, detail = _CRITERIA[number]
        line = f"criterion {number:>2} {'PASS' if passed else 'FAIL'}  {title}"
        terminalreporter.write_line(line + (f"  ({detail})" if detail else ""))
