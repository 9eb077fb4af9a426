import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def crandn(rng, *shape):
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)
