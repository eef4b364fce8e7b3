import numpy as np
import pytest


@pytest.fixture(scope="session")
def rng():
    return np.random.Generator(np.random.Philox(20260816))
