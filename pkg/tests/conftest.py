import math
from pathlib import Path

import numpy as np
import pytest

from fivebar.mechanism import MechanismParams

FIXTURES = Path(__file__).parent / "fixtures"

# reference rehabilitator: link lengths (mm) and crank ranges (deg)
L0, L1, L2 = 101.20, 101.09, 108.67
THETA1_RANGE = (92.37, 153.55)
THETA2_RANGE = (40.44, 83.07)
# joint waypoints (deg) and encoder counts of the 10 s therapy cycle
M1_DEG = [83.07, 35.99, 40.44, 35.99, 83.07]
M2_DEG = [153.55, 104.39, 92.37, 104.39, 153.55]
CONTROL_TIMES = [0.0, 2.5, 5.0, 7.5, 10.0]


@pytest.fixture
def params():
    return MechanismParams(L0, L1, L2)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def load_reference_sweep():
    rows = np.genfromtxt(FIXTURES / "reference_sweep.csv", delimiter=",", comments="#",
                         skip_header=3)
    return rows[:, :2], rows[1:, 2]


def deg(*values):
    return [math.radians(v) for v in values]
