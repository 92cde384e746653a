import math
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from walkpovm.core import CoinState, WalkState  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_coin(rng) -> CoinState:
    v = rng.normal(size=2) + 1j * rng.normal(size=2)
    return CoinState.from_array(v / np.linalg.norm(v))


def random_state(rng, lo=-3, hi=3) -> WalkState:
    a = rng.normal(size=(hi - lo + 1, 2)) + 1j * rng.normal(size=(hi - lo + 1, 2))
    return WalkState(lo, a / np.linalg.norm(a))


PHI_GRID_DEG = [45, 54, 63, 72, 81, 90]


def half_angles(phi):
    return math.cos(phi / 2), math.sin(phi / 2)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
