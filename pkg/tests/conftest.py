import pytest

from nonlocal_relax.envelopes import convex_envelope, separately_convex_envelope
from nonlocal_relax.grid import ScalarGrid, default_grid
from nonlocal_relax.scenario import preset

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def grid():
    return default_grid()


@pytest.fixture(scope="session")
def small_grid():
    # contains 0, +-1/2, +-1 and 2
    return ScalarGrid(-3.0, 3.0, 61)


_cache = {}


def envelopes(name, p=2.0, q=1.0, grid=None):
    """(scenario, W, W_sc, W_co), cached across tests."""
    key = (name, p, q, grid)
    if key not in _cache:
        sc = preset(name, p, q, grid)
        W = sc.W
        _cache[key] = (sc, W, separately_convex_envelope(W), convex_envelope(W))
    return _cache[key]


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
