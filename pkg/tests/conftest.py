import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from kvstring import uniform_grid, validate_params

# Assumption-valid coefficient pairs exercised throughout; (1,2) is fully
# overdamped (k0=0), (1,1) mixed (k0=1), (4,1) has the slow mode at k=0.
PARAM_GRID = [(0.5, 0.1), (0.5, 1.0), (0.5, 2.0),
              (1.0, 0.1), (1.0, 1.0), (1.0, 2.0),
              (4.0, 0.1), (4.0, 1.0), (4.0, 2.0)]


@pytest.fixture(scope="session")
def params12():
    return validate_params(1.0, 2.0)


@pytest.fixture(scope="session")
def params11():
    return validate_params(1.0, 1.0)


@pytest.fixture(scope="session")
def params41():
    return validate_params(4.0, 1.0)


@pytest.fixture(scope="session")
def grid2048():
    return uniform_grid(2048)


@pytest.fixture(scope="session")
def grid1024():
    return uniform_grid(1024)
