import math
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from conftest import built, third_case_network
from noncalib.core import level
from noncalib.netflow import Edge, Network
from noncalib.sampler import Halted, Reached, branches, generate, generate_many, reach_mass, walk_law


def test_uniform_walk_is_fair():
    net = Network(10)
    outs = generate_many(net, range(1000))
    assert all(isinstance(o, Reached) for o in outs)
    ones = sum(o.bits.count("1") for o in outs)
    total = 10 * len(outs)
    assert abs(ones / total - 0.5) <= 3 * 0.5 / math.sqrt(total)


def test_full_delay_at_root_halts():
    net = Network(4, {"": F(1)})
    for s in range(50):
        out = generate(net, s)
        assert out == Halted("") and out.stage == 0
    assert reach_mass(net, 1) == 0


def test_third_case_always_reaches(third_case):
    assert all(isinstance(generate(third_case, s), Reached) for s in range(200))
    assert reach_mass(third_case, 2) == 1


def test_reach_mass_examples():
    uniform = Network(6)
    assert all(reach_mass(uniform, m) == 1 for m in range(7))
    lossy = Network(4, {"": F(1, 4)})
    assert [reach_mass(lossy, m) for m in range(5)] == [1] + [F(3, 4)] * 4
    with pytest.raises(ValueError):
        reach_mass(lossy, 5)


def test_branches_exclude_zero_moves():
    net = Network(3, {"0": F(1)})
    assert branches(net, "0") == []
    assert branches(third_case_network(), "") == [("0", F(3, 8)), ("1", F(3, 8)), ("00", F(1, 4))]


@pytest.mark.parametrize("name, depth", [("const_laplace", 8), ("delayed_laplace", 8), ("markov_twopoint", 8)])
def test_exact_law_matches_flow(name, depth):
    net = built(name, depth)
    visits, halts = walk_law(net)
    for n in range(depth + 1):
        for y in level(n):
            assert visits.get(y, 0) == net.flow.R[y]
    reached = sum(visits.get(y, 0) for y in level(depth))
    assert reached + sum(halts.values()) == 1


def test_exact_law_crafted():
    net = Network(4, {"": F(1, 3), "01": F(1, 2)}, [Edge("", "010", F(1, 3)), Edge("01", "0110", F(1, 2))])
    visits, _ = walk_law(net)
    for n in range(5):
        for y in level(n):
            assert visits.get(y, 0) == net.flow.R[y]


@pytest.mark.slow
def test_monte_carlo_reach_frequency():
    net = built("const_laplace", 12)
    p = float(reach_mass(net, 12))
    trials = 20000
    hits = sum(isinstance(o, Reached) for o in generate_many(net, range(trials)))
    sigma = math.sqrt(p * (1 - p) / trials)
    assert abs(hits / trials - p) <= 3 * sigma + 1e-12


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=2 ** 63))
def test_reproducible(seed):
    net = built("const_laplace", 10)
    assert generate(net, seed) == generate(net, seed)


def test_output_format():
    assert str(Reached("0101")) == "REACHED 0101"
    assert str(Halted("01")) == "HALTED 01 @2"
    assert str(Halted("")) == "HALTED  @0"
