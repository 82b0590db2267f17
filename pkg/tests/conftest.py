from __future__ import annotations

import functools

import pytest
from hypothesis import HealthCheck, settings

from transurf.exactfield import define_field
from transurf.family import build_xn, origami6, origami_surface, torus_origami

settings.register_profile(
    "default", deadline=None, suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large]
)
settings.load_profile("default")

# invariant suites run at least this many random cases
PROPERTY_CASES = 1000


@functools.lru_cache(maxsize=None)
def xn(n: int):
    return build_xn(n)


@functools.lru_cache(maxsize=None)
def golden_field():
    return define_field([-1, -1, 1], (1, 2))


@pytest.fixture(scope="session")
def x3():
    return xn(3)


@pytest.fixture(scope="session")
def o6_surface():
    return origami_surface(origami6())


@pytest.fixture(scope="session")
def torus():
    return origami_surface(torus_origami())


@pytest.fixture(scope="session")
def phi():
    return golden_field().gen


# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[n])
