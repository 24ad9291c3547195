"""Shared fixtures for the sumdiff test-suite."""

import numpy as np
import pytest

from sumdiff import constructions
from sumdiff.config.manager import reset_config_manager
from sumdiff.core import Configuration
from sumdiff.entropy import Measure
from sumdiff.optimizer import OptimizerOptions

SLOPE_POOL = ["0", "1", "2", "1/2", "-2", "inf"]


@pytest.fixture(autouse=True)
def isolated_config(tmp_path):
    """Point the config manager at a file that does not exist, so defaults apply."""
    manager = reset_config_manager(tmp_path / "config.json")
    yield manager
    reset_config_manager()


@pytest.fixture
def ruzsa():
    return constructions.ruzsa_configuration()


@pytest.fixture
def four_point():
    return constructions.four_point_configuration()


@pytest.fixture
def staircase7():
    return constructions.staircase7_configuration()


@pytest.fixture
def five_point():
    return constructions.five_point_configuration()


@pytest.fixture
def fast_options():
    return OptimizerOptions(starts=8, max_evals=5000)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_configuration(rng, min_size=2, max_size=6, side=4):
    """A random difference-injective subset of a side×side grid with 1-3 slopes."""
    while True:
        size = int(rng.integers(min_size, max_size + 1))
        cells = rng.choice(side * side, size=size, replace=False)
        pairs = [(int(cell) // side, int(cell) % side) for cell in cells]
        if len({a - b for a, b in pairs}) < size:
            continue
        count = int(rng.integers(1, 4))
        slopes = [str(s) for s in rng.choice(SLOPE_POOL, size=count, replace=False)]
        return Configuration.from_pairs(pairs, slopes)


def random_measure(rng, size, zero_fraction=0.2):
    """Dirichlet weights with some coordinates zeroed out (never all of them)."""
    weights = rng.dirichlet(np.ones(size))
    mask = rng.random(size) < zero_fraction
    if mask.all():
        mask[0] = False
    weights[mask] = 0.0
    return Measure(tuple((weights / weights.sum()).tolist()))
