import os

import pytest
from hypothesis import HealthCheck, settings

from fermicode.assembler import LayoutSpec, assemble

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", max_examples=500, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

# criterion number -> (passed, detail), filled by test_acceptance.py
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {n:2d}: {detail}")


@pytest.fixture(scope="session")
def pair_d3():
    return assemble(LayoutSpec(3, (1, 2)))


@pytest.fixture(scope="session")
def pair_d5():
    return assemble(LayoutSpec(5, (1, 2)))


@pytest.fixture(scope="session")
def grid_d3():
    return assemble(LayoutSpec(3, (2, 2)))


@pytest.fixture(scope="session")
def stack_d3():
    return assemble(LayoutSpec(3, (1, 2, 2)))
