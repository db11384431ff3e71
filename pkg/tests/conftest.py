import os
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings

from delegation.generators import gen_single_bad, random_suite

settings.register_profile("default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", max_examples=500, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def diag2():
    return gen_single_bad(2)


@pytest.fixture(scope="session")
def suite():
    """The seeded random suite shared by the acceptance criteria."""
    return random_suite(200)


@pytest.fixture
def record_acceptance():
    def record(criterion: int, ok: bool, detail: str):
        line = f"criterion {criterion}: {'PASS' if ok else 'FAIL'} - {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


def frac(s) -> Fraction:
    return Fraction(s)
