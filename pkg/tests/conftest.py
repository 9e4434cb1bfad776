import sys

import pytest

from oddpack import fixtures


@pytest.fixture(params=fixtures.NAMES)
def fixture_name(request):
    return request.param


@pytest.fixture
def i1():
    return fixtures.load("I1")


@pytest.fixture
def i2():
    return fixtures.load("I2")


@pytest.fixture
def i3():
    return fixtures.load("I3")


@pytest.fixture
def i4():
    return fixtures.load("I4")


from hypothesis import settings

settings.register_profile("repro", derandomize=True, print_blob=True)
settings.load_profile("repro")


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(results):
        terminalreporter.write_line(results[k])
