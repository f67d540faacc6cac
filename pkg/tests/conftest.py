from fractions import Fraction as F

import pytest

from noncalib.construction import BuildParams, build_network
from noncalib.forecasters import (
    Constant, Delayed, ForecasterProgram, Laplace, Markov, Parity, TwoPoint,
)
from noncalib.netflow import Edge, Network


def third_case_network(depth=2):
    """d(λ)=1/4 and a recovery edge λ -> 00 of weight 1/4."""
    return Network(depth, {"": F(1, 4)}, [Edge("", "00", F(1, 4))])


@pytest.fixture
def third_case():
    return third_case_network()


POOLS = {
    "const_laplace": [ForecasterProgram(0, Constant(F(7, 10)), 4), ForecasterProgram(1, Laplace(), 4)],
    "delayed_laplace": [
        ForecasterProgram(0, Delayed(Constant(F(7, 10)), 7), 4),
        ForecasterProgram(1, Laplace(), 4),
    ],
    "markov_twopoint": [
        ForecasterProgram(0, Markov(1), 8),
        ForecasterProgram(1, TwoPoint(F(3, 10), F(6, 10), F(1, 2)), 4),
        ForecasterProgram(2, Parity(), 4),
    ],
    "low_const": [ForecasterProgram(0, Constant(F(3, 10)), 4)],
}


_cache = {}


def built(pool_name, depth, eps=F(1, 10)):
    key = (pool_name, depth, eps)
    if key not in _cache:
        _cache[key] = build_network(BuildParams(depth, eps, POOLS[pool_name]))
    return _cache[key]


@pytest.fixture(scope="session")
def net12():
    return built("const_laplace", 12)
