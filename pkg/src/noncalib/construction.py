"""Stage-by-stage construction of the adversarial network.

Stage ``n`` visits task ``i = schedule(n)``. A task either (re)starts by
delaying a ``(n + n0)^-2`` share of the mass at depth ``n`` (Case 1) or, once
started, mounts extra edges ``(x, beta)`` that carry the delayed mass of
``x`` to an extension ``beta`` rich in bits the task's forecaster predicts
badly (Case 2). Mounting by task ``i`` resets every task ``j > i``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .core import ONE, level, schedule, subtree_level, task_stages
from .forecasters import ForecasterProgram, approx_below, hard_bit, hard_value
from .netflow import Edge, Network, NetworkError, StageEvent, validate


class ConstructionError(RuntimeError):
    pass


def i_eff(i: int) -> int:
    return max(i, 1)


def m_bound(i: int) -> int:
    """Window factor ``1 + ceil((2 + 1/log2(i + 2)) * max(i, 1))``."""
    k = i_eff(i)
    base = i + 2
    if base & (base - 1) == 0:
        # exact when log2 is an integer
        return 1 + math.ceil(2 * k + Fraction(k, base.bit_length() - 1))
    return 1 + math.ceil(2 * k + k / math.log2(base))


def min_n0(eps: Fraction) -> int:
    return math.ceil(Fraction(2) / Fraction(eps))


def case1_delay(n: int, n0: int) -> Fraction:
    return Fraction(1, (n + n0) ** 2)


@dataclass
class BuildParams:
    depth: int
    eps: Fraction = Fraction(1, 10)
    pool: list[ForecasterProgram] = field(default_factory=list)
    n0: int | None = None

    def __post_init__(self):
        self.eps = Fraction(self.eps)
        if not 0 < self.eps < 1:
            raise ValueError("eps must lie in (0, 1)")
        if self.depth < 1:
            raise ValueError("depth must be at least 1")
        lo = min_n0(self.eps)
        if self.n0 is None:
            self.n0 = lo
        elif self.n0 < lo:
            raise ValueError(f"n0 = {self.n0} is below ceil(2/eps) = {lo}")


def program_for_task(pool, i: int) -> ForecasterProgram | None:
    return pool[i % len(pool)] if pool else None


def window(i: int, x_len: int) -> range:
    """Positions ``j`` with ``l(x) < j <= m_bound(i) * l(x)``."""
    return range(x_len + 1, m_bound(i) * x_len + 1)


def relation_B(i: int, net: Network, x: str, beta: str, n: int, pool) -> bool:
    prog = program_for_task(pool, i)
    if prog is None or len(x) < 1:
        return False
    if n < m_bound(i) * len(x):
        return False
    if len(beta) != n or not beta.startswith(x):
        return False
    if any(net.delay(beta[:j]) >= ONE for j in range(1, n)):
        return False
    hard = 0
    for j in window(i, len(x)):
        h = hard_bit(prog, beta, j, n)
        if h is None:
            return False
        hard += h
    return hard >= i_eff(i) * len(x)


def beta_min(x: str, net: Network, n: int, pool) -> str | None:
    """Lexicographically least ``beta`` of length ``n`` certified by ``relation_B``.

    Depth-first search over extensions of ``x`` in ``0 < 1`` order; subtrees
    are cut when a prefix is fully delayed, when the forecaster is pending, or
    when the remaining window positions cannot reach the hard-bit quota.
    """
    if len(x) < 1 or len(x) >= n:
        return None
    i = schedule(len(x))
    prog = program_for_task(pool, i)
    if prog is None or schedule(n) != i or n < m_bound(i) * len(x):
        return None
    if any(net.delay(x[:j]) >= ONE for j in range(1, len(x))):
        return None
    last = m_bound(i) * len(x)
    quota = i_eff(i) * len(x)

    def search(prefix: str, hard: int) -> str | None:
        j = len(prefix)
        if j == n:
            return prefix
        if net.delay(prefix) >= ONE:
            return None
        if j < last:
            r = approx_below(prog, prefix, n)
            if r is None:
                return None
            hv = hard_value(r)
            for b in "01":
                h = hard + (b == hv)
                if h + (last - j - 1) < quota:
                    continue
                found = search(prefix + b, h)
                if found:
                    return found
            return None
        for b in "01":
            found = search(prefix + b, hard)
            if found:
                return found
        return None

    return search(x, 0)


def _priority(e: Edge) -> int | None:
    if e.owner is not None:
        return e.owner
    return schedule(len(e.source)) if e.source else None


def w_index(i: int, net: Network) -> int:
    """Least stage ``m`` of task ``i`` beyond every edge of a lower-indexed task."""
    bound = max((len(e.target) for e in net.edges if (_priority(e) is not None and _priority(e) < i)), default=0)
    for m in task_stages(i):
        if m > bound:
            return m


def hard_positions(prog: ForecasterProgram, beta: str, i: int, x_len: int, budget: int) -> tuple[int, ...]:
    return tuple(j for j in window(i, x_len) if hard_bit(prog, beta, j, budget) == 1)


def active_tasks(stage_log) -> set[int]:
    active = set()
    for ev in stage_log:
        if ev.case == 1:
            active.add(ev.task)
        active.difference_update(ev.destroyed)
    return active


def _derive(net: Network, delays, new_edges, event) -> Network:
    out = Network(net.depth, n0=net.n0)
    out.delays = delays
    out.edges = net.edges + new_edges
    out.stage_log = net.stage_log + [event]
    for e in out.edges:
        out._index(e)
    return out


def build_step(net: Network, n: int, pool) -> Network:
    """Network after stage ``n`` from the network after stage ``n - 1``."""
    if net.n0 is None:
        raise ConstructionError("network has no n0")
    if n > net.depth:
        raise ConstructionError(f"stage {n} beyond depth {net.depth}")
    delays = dict(net.delays)
    if not pool:
        return _derive(net, delays, [], StageEvent(n, 3))
    i = schedule(n)
    w = w_index(i, net)
    if w == n:
        value = case1_delay(n, net.n0)
        for y in level(n):
            delays[y] = value
        return _derive(net, delays, [], StageEvent(n, 1, i, w))
    if w > n:
        return _derive(net, delays, [], StageEvent(n, 3, i, w))

    prog = program_for_task(pool, i)
    members = []
    for L in range(max(w, 1), n):
        if schedule(L) != i or m_bound(i) * L > n:
            continue
        for x in level(L):
            d = net.delay(x)
            if not 0 < d < 1 or net.edge_from(x) is not None:
                continue
            beta = beta_min(x, net, n, pool)
            if beta is not None:
                members.append((x, beta, d))
    # shallowest first; released endpoints keep d = 0
    members.sort(key=lambda m: (len(m[0]), m[0]))
    mounts = []
    for x, beta, d in members:
        value = d / (ONE - d)
        for y in subtree_level(x, n):
            delays[y] = value
        mounts.append(Edge(x, beta, d, i, hard_positions(prog, beta, i, len(x), n), n))
    for _, beta, _ in members:
        delays.pop(beta, None)
    destroyed = sorted(j for j in active_tasks(net.stage_log) if j > i) if mounts else []
    event = StageEvent(n, 2, i, w, [x for x, _, _ in members], mounts, destroyed)
    return _derive(net, delays, mounts, event)


def build_network(params: BuildParams, check_every_stage: bool = True) -> Network:
    net = Network(params.depth, n0=params.n0)
    for n in range(1, params.depth + 1):
        net = build_step(net, n, params.pool)
        if check_every_stage or n == params.depth:
            report = validate(net)
            if not report.ok:
                raise ConstructionError(f"stage {n}: " + "; ".join(report.violations[:5]))
    return net


def replay(stage_log, depth: int, n0: int) -> Network:
    """Rebuild a network from its stage log alone, without running forecasters."""
    delays: dict[str, Fraction] = {}
    edges = []
    for ev in stage_log:
        n = ev.stage
        if ev.case == 1:
            value = case1_delay(n, n0)
            for y in level(n):
                delays[y] = value
        elif ev.case == 2:
            for e in sorted(ev.mounts, key=lambda e: (len(e.source), e.source)):
                d = delays.get(e.source, Fraction(0))
                if d != e.weight:
                    raise NetworkError(f"stage {n}: weight of {e.source!r}->{e.target!r} is not d(source)")
                for y in subtree_level(e.source, n):
                    delays[y] = d / (ONE - d)
            for e in ev.mounts:
                delays.pop(e.target, None)
            edges.extend(ev.mounts)
    return Network(depth, delays, edges, n0, stage_log)


def stage_audit(net: Network) -> list[str]:
    """One human-readable line per stage that changed the network."""
    lines = []
    for ev in net.stage_log:
        if ev.case == 1:
            lines.append(f"stage {ev.stage}: case 1, task {ev.task} (re)starts, d = 1/{(ev.stage + net.n0) ** 2} at depth {ev.stage}")
        elif ev.case == 2 and ev.mounts:
            edges = ", ".join(f"{e.source}->{e.target} (w={e.weight}, hard={list(e.hard_positions)})" for e in ev.mounts)
            tail = f"; destroys tasks {ev.destroyed}" if ev.destroyed else ""
            lines.append(f"stage {ev.stage}: case 2, task {ev.task} mounts {edges}{tail}")
    return lines
