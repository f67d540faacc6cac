"""Tree networks with delays and extra edges, their flow ``R`` and semimeasure ``Q``.

A network on the binary tree up to depth ``N`` is given by a delay
``d(x)`` at every node and a set of extra edges ``(source, target)``. Unit
edges out of ``x`` carry ``(1 - d(x)) / 2`` each; an extra edge carries the
weight frozen at mount time, which equals ``d(source)``.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

from .core import HALF, ONE, ZERO, level, rat, rat_str, schedule, subtree_level

FORMAT_VERSION = 1


class NetworkError(ValueError):
    pass


@dataclass(frozen=True)
class Edge:
    source: str
    target: str
    weight: Fraction = ZERO
    owner: int | None = None
    hard_positions: tuple[int, ...] = ()
    mount_stage: int | None = None

    def to_dict(self) -> dict:
        return {
            "source": self.source,
            "target": self.target,
            "weight": rat_str(self.weight),
            "owner": self.owner,
            "hard_positions": list(self.hard_positions),
            "mount_stage": self.mount_stage,
        }

    @classmethod
    def from_dict(cls, d: dict) -> Edge:
        return cls(
            d["source"],
            d["target"],
            rat(d["weight"]),
            d.get("owner"),
            tuple(d.get("hard_positions") or ()),
            d.get("mount_stage"),
        )


@dataclass
class StageEvent:
    stage: int
    case: int
    task: int | None = None
    w: int | None = None
    candidates: list[str] = field(default_factory=list)
    mounts: list[Edge] = field(default_factory=list)
    destroyed: list[int] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "stage": self.stage,
            "case": self.case,
            "task": self.task,
            "w": self.w,
            "candidates": list(self.candidates),
            "mounts": [e.to_dict() for e in self.mounts],
            "destroyed": list(self.destroyed),
        }

    @classmethod
    def from_dict(cls, d: dict) -> StageEvent:
        return cls(
            d["stage"],
            d["case"],
            d.get("task"),
            d.get("w"),
            list(d.get("candidates") or []),
            [Edge.from_dict(e) for e in d.get("mounts") or []],
            list(d.get("destroyed") or []),
        )


class Network:
    """Finite-depth network; treat as immutable once handed out."""

    def __init__(self, depth: int, delays=None, edges=(), n0: int | None = None, stage_log=()):
        if depth < 0:
            raise NetworkError("depth must be nonnegative")
        self.depth = depth
        self.n0 = n0
        self.delays: dict[str, Fraction] = {}
        for x, v in (delays or {}).items():
            v = rat(v)
            if len(x) > depth:
                raise NetworkError(f"delay on node {x!r} beyond depth {depth}")
            if v:
                self.delays[x] = v
        self.edges: list[Edge] = list(edges)
        self.stage_log: list[StageEvent] = list(stage_log)
        self._out = {}
        self._in: dict[str, list[Edge]] = {}
        for e in self.edges:
            self._index(e)

    def _index(self, e: Edge):
        self._out.setdefault(e.source, []).append(e)
        self._in.setdefault(e.target, []).append(e)

    def copy(self) -> Network:
        return Network(self.depth, self.delays, self.edges, self.n0, self.stage_log)

    def delay(self, x: str) -> Fraction:
        return self.delays.get(x, ZERO)

    def unit_weight(self, x: str) -> Fraction:
        return (ONE - self.delay(x)) * HALF

    def edges_from(self, x: str) -> list[Edge]:
        return self._out.get(x, [])

    def edge_from(self, x: str) -> Edge | None:
        out = self._out.get(x)
        return out[0] if out else None

    def edges_into(self, y: str) -> list[Edge]:
        return self._in.get(y, [])

    def check_node(self, x: str):
        if len(x) > self.depth:
            raise NetworkError(f"node {x!r} beyond depth {self.depth}")

    @cached_property
    def flow(self) -> FlowSemimeasure:
        return FlowSemimeasure(self)

    # serialization

    def to_dict(self) -> dict:
        delays = {x: rat_str(v) for x, v in sorted(self.delays.items(), key=lambda kv: (len(kv[0]), kv[0]))}
        return {
            "version": FORMAT_VERSION,
            "depth": self.depth,
            "n0": self.n0,
            "delays": delays,
            "edges": [e.to_dict() for e in self.edges],
            "stage_log": [ev.to_dict() for ev in self.stage_log],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":")) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> Network:
        for key in ("version", "depth", "delays", "edges"):
            if key not in d:
                raise NetworkError(f"{key}: missing from network file")
        if d["version"] != FORMAT_VERSION:
            raise NetworkError(f"version: unsupported network format {d['version']!r}")
        return cls(
            int(d["depth"]),
            d["delays"],
            [Edge.from_dict(e) for e in d["edges"]],
            d.get("n0"),
            [StageEvent.from_dict(ev) for ev in d.get("stage_log") or []],
        )

    @classmethod
    def from_json(cls, text: str) -> Network:
        return cls.from_dict(json.loads(text))

    def save(self, path):
        with open(path, "w") as fh:
            fh.write(self.to_json())

    @classmethod
    def load(cls, path) -> Network:
        with open(path) as fh:
            return cls.from_json(fh.read())

    def digest(self) -> str:
        return hashlib.sha256(self.to_json().encode()).hexdigest()

    def __eq__(self, other):
        return isinstance(other, Network) and self.to_json() == other.to_json()

    __hash__ = None


class FlowSemimeasure:
    """Memoized ``R`` (pushed level by level) and ``Q`` (pulled bottom-up)."""

    def __init__(self, net: Network):
        self.net = net
        self._R = None
        self._Q = None

    @property
    def R(self) -> dict[str, Fraction]:
        if self._R is None:
            self._R = self._compute_R()
        return self._R

    @property
    def Q(self) -> dict[str, Fraction]:
        if self._Q is None:
            self._Q = self._compute_Q()
        return self._Q

    def _compute_R(self):
        net = self.net
        by_depth = {}
        for e in net.edges:
            by_depth.setdefault(len(e.target), []).append(e)
        R = {"": ONE}
        delays = net.delays
        for n in range(net.depth):
            for x in level(n):
                r = R[x]
                d = delays.get(x)
                q = r * HALF if d is None else r * (ONE - d) * HALF
                R[x + "0"] = q
                R[x + "1"] = q
            for e in by_depth.get(n + 1, ()):
                R[e.target] += e.weight * R[e.source]
        return R

    def _compute_Q(self):
        R = self.R
        N = self.net.depth
        Q = {y: R[y] for y in level(N)}
        for n in range(N - 1, -1, -1):
            for x in level(n):
                Q[x] = max(R[x], Q[x + "0"] + Q[x + "1"])
        return Q

    def level_sum(self, table: dict, x: str, m: int) -> Fraction:
        return sum((table[y] for y in subtree_level(x, m)), ZERO)


def flow_R(net: Network, y: str) -> Fraction:
    net.check_node(y)
    return net.flow.R[y]


def semimeasure_Q(net: Network, x: str) -> Fraction:
    net.check_node(x)
    return net.flow.Q[x]


def bar_Q(net: Network, x: str) -> Fraction:
    """``min_m sum_{l(y)=m, x ⊑ y} Q(y)`` over the levels ``m = l(x)..N``."""
    net.check_node(x)
    flow = net.flow
    return min(flow.level_sum(flow.Q, x, m) for m in range(len(x), net.depth + 1))


def support_member(net: Network, x: str) -> bool:
    """True iff no proper prefix of ``x`` is fully delayed (``d = 1``)."""
    net.check_node(x)
    return all(net.delay(x[:k]) != ONE for k in range(len(x)))


@dataclass
class ValidationReport:
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok


def _is_delay_form(v: Fraction) -> bool:
    return v == 0 or (v.numerator == 1 and v.denominator >= 1)


def validate(net: Network) -> ValidationReport:
    """Check delay form, outflow bounds, edge structure and that no edge crosses a blocked node."""
    report = ValidationReport()
    bad = report.violations
    for x, v in net.delays.items():
        if len(x) > net.depth:
            bad.append(f"delay: node {x!r} beyond depth")
        if not _is_delay_form(v):
            bad.append(f"delay: d({x!r}) = {v} is not 0 or 1/k")
    sources = {}
    for e in net.edges:
        tag = f"edge {e.source!r}->{e.target!r}"
        if e.source in sources:
            bad.append(f"{tag}: second extra edge leaving {e.source!r}")
        sources[e.source] = e
        if not e.target.startswith(e.source) or len(e.target) - len(e.source) < 2:
            bad.append(f"{tag}: target must extend source by at least 2 bits")
        if len(e.target) > net.depth:
            bad.append(f"{tag}: target beyond depth")
        if e.weight < 0:
            bad.append(f"{tag}: negative weight")
        if e.weight != net.delay(e.source):
            bad.append(f"{tag}: weight {e.weight} differs from d(source) = {net.delay(e.source)}")
        if e.owner is not None and len(e.source) >= 1:
            ps, pt = schedule(len(e.source)), schedule(len(e.target))
            if not ps == pt == e.owner:
                bad.append(f"{tag}: schedule mismatch p(l(source))={ps}, p(l(target))={pt}, owner={e.owner}")
        for k in range(len(e.source), len(e.target)):
            if net.delay(e.target[:k]) == ONE:
                bad.append(f"{tag}: crosses fully delayed node {e.target[:k]!r}")
                break
    nodes = set(net.delays) | set(sources)
    for x in sorted(nodes, key=lambda s: (len(s), s)):
        d = net.delay(x)
        if not 0 <= d <= 1:
            bad.append(f"delay: d({x!r}) = {d} outside [0, 1]")
        out = (ONE - d) + sum((e.weight for e in net.edges_from(x)), ZERO)
        if out > 1:
            bad.append(f"outflow: {out} > 1 at node {x!r}")
    return report


def semimeasure_violations(net: Network) -> list[str]:
    """Exact check of ``Q(λ) <= 1``, ``Q(x0) + Q(x1) <= Q(x)`` and ``Q >= R``."""
    flow = net.flow
    R, Q = flow.R, flow.Q
    bad = []
    if Q[""] > 1:
        bad.append(f"Q(λ) = {Q['']} > 1")
    for n in range(net.depth + 1):
        for x in level(n):
            if Q[x] < R[x]:
                bad.append(f"Q({x!r}) < R({x!r})")
            if n < net.depth and Q[x + "0"] + Q[x + "1"] > Q[x]:
                bad.append(f"Q({x!r}0) + Q({x!r}1) > Q({x!r})")
    return bad
