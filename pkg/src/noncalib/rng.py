"""Counter-based random streams with exact rational branching.

Every stream is a Philox4x64 generator keyed by ``SeedSequence([seed, *labels])``,
so ``(seed, labels)`` fully determines it. Branch probabilities are rationals;
a branch is picked by drawing a uniform integer below their common
denominator, which keeps the choice exact.
"""
from __future__ import annotations

from fractions import Fraction
from math import lcm

import numpy as np

STREAM_GENERATE = 0
STREAM_TRIALS = 1
STREAM_FORECAST = 2

_MASK = (1 << 64) - 1


def generator(seed: int, *labels: int) -> np.random.Generator:
    entropy = [int(seed) & _MASK, *(int(v) for v in labels)]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))


def randbelow(rng: np.random.Generator, n: int) -> int:
    """Uniform integer in ``[0, n)`` for arbitrarily large ``n``."""
    if n <= 0:
        raise ValueError("n must be positive")
    if n < (1 << 63):
        return int(rng.integers(0, n))
    bits = n.bit_length()
    while True:
        words = (bits + 63) // 64
        v = 0
        for w in rng.integers(0, 1 << 63, size=words, dtype=np.int64).tolist():
            v = (v << 63) | w
        v >>= words * 63 - bits
        if v < n:
            return v


def thresholds(probs) -> tuple[int, list[int]]:
    """Common denominator and cumulative numerators of ``probs``.

    The probabilities may sum to less than one; the remainder is an extra
    final branch with index ``len(probs)``.
    """
    probs = [Fraction(p) for p in probs]
    den = lcm(*(p.denominator for p in probs)) if probs else 1
    cum, acc = [], 0
    for p in probs:
        acc += p.numerator * (den // p.denominator)
        cum.append(acc)
    if acc > den:
        raise ValueError("probabilities sum above one")
    return den, cum


def pick(rng: np.random.Generator, den: int, cum: list[int]) -> int:
    u = randbelow(rng, den)
    for k, c in enumerate(cum):
        if u < c:
            return k
    return len(cum)


def choose(rng: np.random.Generator, probs) -> int:
    den, cum = thresholds(probs)
    return pick(rng, den, cum)
