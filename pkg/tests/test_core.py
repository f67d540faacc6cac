import random
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from noncalib.core import (
    indicator, is_prefix, level, pair, prefixes, rat, rat_str, schedule, subtree_level, task_stages, unpair,
)


def diagonal_order(count):
    """Pairs in Cantor order, listed diagonal by diagonal."""
    out, w = [], 0
    while len(out) < count:
        for s in range(w + 1):
            out.append((w - s, s))
        w += 1
    return out[:count]


def test_unpair_matches_diagonal_enumeration():
    for i, ts in enumerate(diagonal_order(5000)):
        assert unpair(i) == ts
        assert pair(*ts) == i


@pytest.mark.parametrize("n, task", [(1, 0), (2, 1), (3, 0)])
def test_schedule_examples(n, task):
    assert schedule(n) == task


def test_schedule_rejects_stage_zero():
    with pytest.raises(ValueError):
        schedule(0)


def test_pairing_bijective_on_grid():
    seen = set()
    for t in range(0, 10_000, 97):
        for s in range(0, 10_000, 89):
            i = pair(t, s)
            assert unpair(i) == (t, s)
            seen.add(i)
    assert len(seen) == len(range(0, 10_000, 97)) * len(range(0, 10_000, 89))


@given(st.integers(0, 10**4), st.integers(0, 10**4))
def test_pair_roundtrip(t, s):
    assert unpair(pair(t, s)) == (t, s)


def test_every_task_recurs():
    counts = {}
    for n in range(1, 10_001):
        counts[schedule(n)] = counts.get(schedule(n), 0) + 1
    assert all(counts.get(i, 0) >= 10 for i in range(11))


def test_task_stages_are_schedule_hits():
    gen = task_stages(3)
    stages = [next(gen) for _ in range(6)]
    assert stages == [n for n in range(1, 200) if schedule(n) == 3][:6]


@pytest.mark.parametrize("nu, p, expected", [(0, F(49, 100), 1), (1, F(1, 2), 1), (0, F(1, 2), 0)])
def test_indicator_examples(nu, p, expected):
    assert indicator(nu, p) == expected


def test_indicator_rejects_out_of_range():
    with pytest.raises(ValueError):
        indicator(0, F(11, 10))
    with pytest.raises(ValueError):
        indicator(1, F(-1, 10))


def test_indicator_partition():
    rnd = random.Random(7)
    for _ in range(1000):
        den = rnd.randint(1, 10**6)
        p = F(rnd.randint(0, den), den)
        assert indicator(0, p) + indicator(1, p) == 1


@given(st.fractions(), st.fractions())
def test_rational_arithmetic_is_exact(a, b):
    assert (a + b) - b == a


def test_rat_rendering():
    assert rat_str(F(7, 10)) == "7/10"
    assert rat_str(F(1)) == "1/1"
    assert rat("3/12") == F(1, 4)
    with pytest.raises(TypeError):
        rat(0.5)


def test_prefix_helpers():
    assert list(prefixes("101")) == ["", "1", "10", "101"]
    assert list(prefixes("101", proper=True)) == ["", "1", "10"]
    assert is_prefix("", "01") and is_prefix("01", "01") and not is_prefix("1", "01")
    assert list(level(2)) == ["00", "01", "10", "11"]
    assert list(subtree_level("1", 3)) == ["100", "101", "110", "111"]
