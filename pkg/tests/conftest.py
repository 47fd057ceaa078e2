import numpy as np
import pytest

from voronoi_pursuit.errors import GeometryError
from voronoi_pursuit.voronoi import evader_cell

# published set-up shared by every reference case
PURSUERS = [(-80.65, 44.48), (63.63, -70.02), (63.51, 31.92)]
EVADER = (0.7438, 18.92)

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


def random_configuration(rng, n_min=3, n_max=7, spread=50.0):
    """Random evader/pursuer layout whose evader cell is bounded, or None."""
    n = int(rng.integers(n_min, n_max + 1))
    evader = rng.uniform(-10, 10, size=2)
    ang = np.sort(rng.uniform(0, 2 * np.pi, size=n))
    rad = rng.uniform(0.2 * spread, spread, size=n)
    pursuers = evader + np.c_[rad * np.cos(ang), rad * np.sin(ang)]
    try:
        cell = evader_cell(evader, pursuers)
    except GeometryError:
        return None
    return evader, pursuers, cell


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
