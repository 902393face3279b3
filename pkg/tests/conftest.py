import numpy as np
import pytest

from k3period.indefinite import QuadraticSpace


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


@pytest.fixture
def space31():
    return QuadraticSpace.standard(1)


@pytest.fixture
def space32():
    return QuadraticSpace.standard(2)
