import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "agslice", deadline=None, derandomize=True, max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("agslice")

SMALL_FORMS = ["sl 2 R", "sl 3 R", "su 1 2", "sp 2 R", "so 2 3", "so 1 3", "su 2 2"]


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


# acceptance criteria report one line each at the end of the session
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=int):
        terminalreporter.write_line(ACCEPTANCE[key])


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep
