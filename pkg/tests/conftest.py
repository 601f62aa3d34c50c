import numpy as np
import pytest

from weedsim.geometry import Field


@pytest.fixture
def small_field():
    return Field(
        np.array([[0.0, 0.0], [20.0, 0.0], [20.0, 10.0], [0.0, 10.0]]),
        grid_step=0.05,
    )


@pytest.fixture
def tiny_field():
    return Field(
        np.array([[0.0, 0.0], [5.0, 0.0], [5.0, 4.0], [0.0, 4.0]]),
        grid_step=0.05,
    )


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
