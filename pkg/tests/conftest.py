import math

import pytest

from stochsol.noise_field import BoundaryPolicy, GridSpec, NoiseRealization, build_realization


@pytest.fixture(scope="session")
def grid():
    return GridSpec(0.0, 2 * math.pi, 8, 1.0, 16)


@pytest.fixture(scope="session")
def noise(grid):
    return build_realization(grid, 1, BoundaryPolicy.PERIODIC_IN_X)


@pytest.fixture(scope="session")
def zero_noise(grid):
    return NoiseRealization.zeros(grid)


def within(est, oracle, k=3.0, floor=0.0):
    """|mean - oracle| <= max(k * stderr, floor)."""
    return abs(est.mean - oracle) <= max(k * est.stderr, floor)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
