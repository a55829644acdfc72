import numpy as np
import pytest

from polyak_rates.loaders import Problem
from polyak_rates.oracles import PiecewiseAffine, SubgradientOracle


@pytest.fixture
def abs_function():
    """f(x) = |x| = max(x, -x) on the real line."""
    return PiecewiseAffine.from_pieces([([1.], 0.), ([-1.], 0.)])


@pytest.fixture
def abs_oracle(abs_function):
    return SubgradientOracle.from_piecewise_affine(abs_function, f_star=0., subgradient_bound=1.)


@pytest.fixture
def abs_problem(abs_function):
    return Problem(abs_function, np.array([1.]), 0., 1., np.array([0.]), None)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
