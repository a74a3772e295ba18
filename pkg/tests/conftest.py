import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def laplace_signal(seed, n):
    """Unit-variance i.i.d. Laplace draw, the standard super-gaussian source."""
    return np.random.default_rng(seed).laplace(0.0, 1.0 / np.sqrt(2.0), n)
