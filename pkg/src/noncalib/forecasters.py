"""Budgeted partial forecasters and their weak probability distribution functions.

A forecaster maps an outcome prefix to a law over forecast values: a tuple of
``(value, probability)`` pairs. Deterministic kinds have a one-point law.
Partiality is modelled by a step count: evaluating on ``x`` needs
``steps(x)`` steps, and ``None`` means the computation never halts.

Evaluation results follow one convention throughout the package: a
``Fraction`` (or an ``int`` bit) when the value is computed within the budget,
``None`` when it is still pending.
"""
from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from fractions import Fraction

from .core import HALF, ONE, ZERO, pair, rat, rat_str
from .rng import STREAM_FORECAST, choose, generator


class ForecasterUndefined(Exception):
    """The forecaster never halts on this input."""

    def __init__(self, x: str):
        super().__init__(f"forecaster undefined on prefix {x!r}")
        self.prefix = x


class Forecaster:
    randomized = False

    def steps(self, x: str) -> int | None:
        return 0

    def law(self, x: str) -> tuple[tuple[Fraction, Fraction], ...]:
        raise NotImplementedError

    def to_config(self) -> dict:
        raise NotImplementedError


def _check_unit(name: str, p: Fraction) -> Fraction:
    p = rat(p)
    if not 0 <= p <= 1:
        raise ValueError(f"{name} must lie in [0, 1], got {p}")
    return p


@dataclass(frozen=True)
class Constant(Forecaster):
    p: Fraction

    def __post_init__(self):
        object.__setattr__(self, "p", _check_unit("p", self.p))

    def law(self, x):
        return ((self.p, ONE),)

    def to_config(self):
        return {"kind": "constant", "params": {"p": rat_str(self.p)}}


@dataclass(frozen=True)
class Laplace(Forecaster):
    """Rule of succession: ``(#ones + 1) / (l(x) + 2)``."""

    def law(self, x):
        return ((Fraction(x.count("1") + 1, len(x) + 2), ONE),)

    def to_config(self):
        return {"kind": "laplace", "params": {}}


@dataclass(frozen=True)
class Markov(Forecaster):
    """Order-``k`` context counts with add-one smoothing.

    Forecasts ``(#{context followed by 1} + 1) / (#{context followed by a bit} + 2)``
    where the context is the last ``k`` bits; ``1/2`` while ``l(x) < k``.
    """

    k: int = 1

    def __post_init__(self):
        if self.k < 0:
            raise ValueError("markov order must be nonnegative")

    def law(self, x):
        if len(x) < self.k:
            return ((HALF, ONE),)
        ctx = x[len(x) - self.k:]
        # lookahead keeps overlapping matches
        seen = len(re.findall(f"(?={ctx}[01])", x))
        ones = len(re.findall(f"(?={ctx}1)", x))
        return ((Fraction(ones + 1, seen + 2), ONE),)

    def to_config(self):
        return {"kind": "markov", "params": {"k": self.k}}


@dataclass(frozen=True)
class Parity(Forecaster):
    """Forecast ``high`` after an even number of ones, ``low`` after an odd one."""

    high: Fraction = Fraction(3, 4)
    low: Fraction = Fraction(1, 4)

    def __post_init__(self):
        object.__setattr__(self, "high", _check_unit("high", self.high))
        object.__setattr__(self, "low", _check_unit("low", self.low))

    def law(self, x):
        return ((self.high if x.count("1") % 2 == 0 else self.low, ONE),)

    def to_config(self):
        return {"kind": "parity", "params": {"high": rat_str(self.high), "low": rat_str(self.low)}}


@dataclass(frozen=True)
class TwoPoint(Forecaster):
    """Forecast ``a`` with probability ``alpha`` and ``b`` otherwise."""

    a: Fraction
    b: Fraction
    alpha: Fraction = HALF
    randomized = True

    def __post_init__(self):
        for name in ("a", "b", "alpha"):
            object.__setattr__(self, name, _check_unit(name, getattr(self, name)))

    def law(self, x):
        if self.a == self.b:
            return ((self.a, ONE),)
        return ((self.a, self.alpha), (self.b, ONE - self.alpha))

    def to_config(self):
        return {
            "kind": "two_point",
            "params": {"a": rat_str(self.a), "b": rat_str(self.b), "alpha": rat_str(self.alpha)},
        }


@dataclass(frozen=True)
class Delayed(Forecaster):
    """Adds a fixed number of steps to every evaluation of ``inner``."""

    inner: Forecaster
    latency: int

    @property
    def randomized(self):
        return self.inner.randomized

    def steps(self, x):
        inner = self.inner.steps(x)
        return None if inner is None else inner + self.latency

    def law(self, x):
        return self.inner.law(x)

    def to_config(self):
        cfg = self.inner.to_config()
        cfg["latency"] = cfg.get("latency", 0) + self.latency
        return cfg


@dataclass(frozen=True)
class UndefinedAfter(Forecaster):
    """``inner`` on prefixes shorter than ``cutoff``; never halts on longer ones."""

    inner: Forecaster
    cutoff: int

    @property
    def randomized(self):
        return self.inner.randomized

    def steps(self, x):
        if len(x) >= self.cutoff:
            return None
        return self.inner.steps(x)

    def law(self, x):
        if len(x) >= self.cutoff:
            raise ForecasterUndefined(x)
        return self.inner.law(x)

    def to_config(self):
        cfg = self.inner.to_config()
        cfg["cutoff"] = self.cutoff
        return cfg


@dataclass(frozen=True)
class ForecasterProgram:
    """Pool entry ``t`` read with precision ``kappa = 1/s``."""

    t: int
    forecaster: Forecaster
    s: int = 4
    name: str = ""

    def __post_init__(self):
        if self.s < 1:
            raise ValueError("precision index s must be >= 1")
        if self.t < 0:
            raise ValueError("pool index must be nonnegative")

    @property
    def kappa(self) -> Fraction:
        return Fraction(1, self.s)

    @property
    def program_id(self) -> int:
        return pair(self.t, self.s)


def law(f: Forecaster, x: str):
    """Exact law of ``f`` on ``x``; raises :class:`ForecasterUndefined` on divergence."""
    if f.steps(x) is None:
        raise ForecasterUndefined(x)
    return f.law(x)


def weak_pdf(f: Forecaster, x: str, budget: int) -> Fraction | None:
    """``Pr{f(x) >= 1/2}`` if ``f`` halts on ``x`` within ``budget`` steps."""
    need = f.steps(x)
    if need is None or need > budget:
        return None
    return sum((pr for v, pr in f.law(x) if v >= HALF), ZERO)


def approx_below(prog: ForecasterProgram, x: str, budget: int) -> Fraction | None:
    """Grid value ``floor(phi * s) / s``, so ``r <= phi <= r + 1/s``."""
    v = weak_pdf(prog.forecaster, x, budget)
    if v is None:
        return None
    return Fraction(math.floor(v * prog.s), prog.s)


def hard_bit(prog: ForecasterProgram, beta: str, k: int, budget: int) -> int | None:
    """1 if bit ``k`` (1-based) of ``beta`` is hardly predictable by ``prog``.

    The bit is hard when it is 0 although the approximation on ``beta^{k-1}``
    is at least 1/2, or 1 although it is below 1/2.
    """
    if not 1 <= k <= len(beta):
        raise ValueError(f"position {k} outside 1..{len(beta)}")
    r = approx_below(prog, beta[: k - 1], budget)
    if r is None:
        return None
    return int(beta[k - 1] == hard_value(r))


def hard_value(r: Fraction) -> str:
    """The bit that would be hardly predictable after approximation ``r``."""
    return "0" if r >= HALF else "1"


def sample_forecast(f: Forecaster, x: str, seed: int) -> Fraction:
    """One draw from ``f``'s law on ``x``, a pure function of ``(f, x, seed)``."""
    dist = law(f, x)
    if len(dist) == 1:
        return dist[0][0]
    rng = generator(seed, STREAM_FORECAST, len(x), int("1" + x, 2))
    return dist[choose(rng, [pr for _, pr in dist])][0]


def expected_term(f: Forecaster, x: str, outcome: int, nu: int) -> Fraction:
    """``E[I_nu(p)(outcome - p)]`` under the exact law of ``f`` on ``x``."""
    total = ZERO
    for v, pr in law(f, x):
        if (v >= HALF) == (nu == 1):
            total += pr * (outcome - v)
    return total


# --- pool configuration -----------------------------------------------------

_KINDS = {
    "constant": lambda p: Constant(rat(p["p"])),
    "laplace": lambda p: Laplace(),
    "markov": lambda p: Markov(int(p.get("k", 1))),
    "parity": lambda p: Parity(rat(p.get("high", "3/4")), rat(p.get("low", "1/4"))),
    "two_point": lambda p: TwoPoint(rat(p["a"]), rat(p["b"]), rat(p.get("alpha", "1/2"))),
}


class PoolConfigError(ValueError):
    pass


def forecaster_from_config(entry: dict) -> Forecaster:
    kind = entry.get("kind")
    if kind not in _KINDS:
        raise PoolConfigError(f"kind: unknown forecaster kind {kind!r}")
    try:
        f = _KINDS[kind](entry.get("params") or {})
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise PoolConfigError(f"params: bad parameters for {kind}: {exc}") from exc
    latency = int(entry.get("latency") or 0)
    if latency < 0:
        raise PoolConfigError("latency: must be nonnegative")
    if latency:
        f = Delayed(f, latency)
    cutoff = entry.get("cutoff")
    if cutoff is not None:
        f = UndefinedAfter(f, int(cutoff))
    return f


def pool_from_config(entries: list[dict]) -> list[ForecasterProgram]:
    if not isinstance(entries, list):
        raise PoolConfigError("pool: expected a JSON array")
    pool = []
    for t, entry in enumerate(entries):
        f = forecaster_from_config(entry)
        s = int(entry.get("s", 4))
        if s < 1:
            raise PoolConfigError(f"s: entry {t} needs s >= 1")
        pool.append(ForecasterProgram(t, f, s, entry.get("name") or f"f{t}"))
    return pool


def pool_to_config(pool: list[ForecasterProgram]) -> list[dict]:
    out = []
    for prog in pool:
        cfg = {"name": prog.name, "latency": 0, "cutoff": None, "s": prog.s}
        cfg.update(prog.forecaster.to_config())
        out.append(cfg)
    return out


def load_pool(path) -> list[ForecasterProgram]:
    with open(path) as fh:
        try:
            entries = json.load(fh)
        except json.JSONDecodeError as exc:
            raise PoolConfigError(f"pool: invalid JSON ({exc})") from exc
    return pool_from_config(entries)
