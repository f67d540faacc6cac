"""The probabilistic generator: a random walk that realizes the flow ``R``.

At node ``x`` the walk steps to ``x0`` or ``x1`` with probability
``(1 - d(x)) / 2`` each, jumps along the extra edge leaving ``x`` with its
weight, and halts with the remaining probability.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .core import ONE, ZERO, level
from .netflow import Network
from .rng import STREAM_GENERATE, generator, pick, thresholds


@dataclass(frozen=True)
class Reached:
    bits: str

    def __str__(self):
        return f"REACHED {self.bits}"


@dataclass(frozen=True)
class Halted:
    bits: str

    @property
    def stage(self) -> int:
        return len(self.bits)

    def __str__(self):
        return f"HALTED {self.bits} @{self.stage}"


def branches(net: Network, x: str) -> list[tuple[str, Fraction]]:
    """Moves out of ``x`` with their probabilities; halting is the remainder."""
    u = net.unit_weight(x)
    moves = [(x + "0", u), (x + "1", u)]
    moves += [(e.target, e.weight) for e in net.edges_from(x)]
    return [(y, p) for y, p in moves if p]


def _table(net: Network, x: str, cache: dict):
    entry = cache.get(x)
    if entry is None:
        moves = branches(net, x)
        den, cum = thresholds([p for _, p in moves])
        entry = cache[x] = ([y for y, _ in moves], den, cum)
    return entry


def generate(net: Network, seed: int, _cache: dict | None = None) -> Reached | Halted:
    rng = generator(seed, STREAM_GENERATE)
    cache = _cache if _cache is not None else {}
    x = ""
    while len(x) < net.depth:
        targets, den, cum = _table(net, x, cache)
        k = pick(rng, den, cum)
        if k == len(targets):
            return Halted(x)
        x = targets[k]
    return Reached(x)


def generate_many(net: Network, seeds) -> list[Reached | Halted]:
    cache: dict = {}
    return [generate(net, s, cache) for s in seeds]


def reach_mass(net: Network, m: int) -> Fraction:
    """Probability that the walk gets to depth ``m``: the level sum of ``R``."""
    if not 0 <= m <= net.depth:
        raise ValueError(f"depth {m} outside 0..{net.depth}")
    R = net.flow.R
    return sum((R[y] for y in level(m)), ZERO)


def walk_law(net: Network) -> tuple[dict[str, Fraction], dict[str, Fraction]]:
    """Exact visit and halt probabilities by enumerating every walk path.

    Independent of the flow recursion: mass is pushed along each path of
    choices made by :func:`branches`, never pulled from incoming edges.
    """
    visits: dict[str, Fraction] = {}
    halts: dict[str, Fraction] = {}

    def walk(x: str, p: Fraction):
        visits[x] = visits.get(x, ZERO) + p
        if len(x) == net.depth:
            return
        moves = branches(net, x)
        rest = ONE - sum((q for _, q in moves), ZERO)
        if rest:
            halts[x] = halts.get(x, ZERO) + p * rest
        for y, q in moves:
            walk(y, p * q)

    walk("", ONE)
    return visits, halts
