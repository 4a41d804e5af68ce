import numpy as np
import pytest

from src.gauge import LoopPath, make_connection


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def loop2():
    return LoopPath(np.array([0.3, -0.2]), np.array([[0.8, 0.3, -0.1], [0.5, -0.4, 0.2]]))


@pytest.fixture
def loop3():
    return LoopPath(np.array([0.1, 0.2, -0.3]),
                    np.array([[0.6, -0.2], [0.4, 0.3], [-0.5, 0.25]]))


@pytest.fixture
def maxwell2():
    f = np.array([[0.0, 1.3], [-1.3, 0.0]])
    return make_connection("abelian_constant_F", 2, 2, np.random.default_rng(0), f=f)


@pytest.fixture
def poly2(rng):
    return make_connection("polynomial_random", 2, 2, rng, scale=0.5)


@pytest.fixture
def poly3():
    return make_connection("polynomial_random", 3, 3, np.random.default_rng(7), scale=0.4)
