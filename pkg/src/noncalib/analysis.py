"""Independent oracles and audits over built networks.

Everything here recomputes its quantities from first principles (the network
tables, the forecaster laws, brute-force enumeration) rather than trusting the
records the builder left behind.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .checking import GammaRule, JRule, PartialityError, Product, calib_deviation, deviation_trace
from .construction import i_eff, m_bound, program_for_task, window
from .core import HALF, ONE, ZERO, level, rat_str
from .forecasters import (
    ForecasterProgram,
    ForecasterUndefined,
    approx_below,
    expected_term,
    hard_bit,
    hard_value,
    law,
    sample_forecast,
)
from .netflow import Network
from .rng import STREAM_TRIALS, generator, thresholds
from .sampler import Halted, generate

REPORT_VERSION = "1"
MAX_ORACLE_BITS = 24


# --- hard-bit counting --------------------------------------------------------

def sparse_member(prog: ForecasterProgram, x: str, gamma: str, budget: int, threshold: int) -> bool:
    """Whether ``gamma`` is defined throughout and has fewer than ``threshold`` hard bits."""
    hard = 0
    for k in range(len(gamma)):
        r = approx_below(prog, x + gamma[:k], budget)
        if r is None:
            return False
        hard += gamma[k] == hard_value(r)
    return hard < threshold


def hard_portion_oracle(prog: ForecasterProgram, x: str, n: int, budget: int, task: int = 0) -> Fraction:
    """Exact share of extensions ``gamma`` of length ``K = (m_bound(task) - 1) * n`` that
    are evaluated in full yet carry fewer than ``i_eff(task) * n`` hard bits.

    Every one of the ``2^K`` strings is visited (as a leaf of the binary tree).
    """
    K = (m_bound(task) - 1) * n
    if K > MAX_ORACLE_BITS:
        raise ValueError(f"K = {K} exceeds the enumeration limit {MAX_ORACLE_BITS}")
    threshold = i_eff(task) * n

    def count(gamma: str, hard: int, defined: bool) -> int:
        if len(gamma) == K:
            return int(defined and hard < threshold)
        r = approx_below(prog, x + gamma, budget) if defined else None
        ok = r is not None
        hv = hard_value(r) if ok else None
        return sum(count(gamma + b, hard + (b == hv), ok) for b in "01")

    return Fraction(count("", 0, True), 2 ** K)


def certify_mounts(net: Network, pool) -> list[dict]:
    """Recount hard bits on every extra edge with :func:`hard_bit` directly."""
    out = []
    for e in net.edges:
        i = e.owner
        prog = program_for_task(pool, i)
        m = len(e.source)
        positions = [j for j in window(i, m) if hard_bit(prog, e.target, j, e.mount_stage) == 1]
        required = i_eff(i) * m
        out.append({
            "source": e.source,
            "target": e.target,
            "task": i,
            "hard_count": len(positions),
            "required": required,
            "matches_record": tuple(positions) == tuple(e.hard_positions),
            "ok": len(positions) >= required,
        })
    return out


# --- flow series ----------------------------------------------------------------

@dataclass(frozen=True)
class SRow:
    n: int
    S: Fraction
    bound: Fraction | None
    ok: bool
    case: int | None = None
    step_ok: bool = True


def s_series(net: Network) -> list[Fraction]:
    R = net.flow.R
    arriving = {}
    for e in net.edges:
        arriving[len(e.target)] = arriving.get(len(e.target), ZERO) + e.weight * R[e.source]
    return [sum((R[u] for u in level(n)), ZERO) - arriving.get(n, ZERO) for n in range(net.depth + 1)]


def audit_S_series(net: Network) -> list[SRow]:
    """Per-level check of ``S_{n+1} >= S_n`` (``- (n+n0)^-2`` after a Case 1 stage)
    and of the cumulative floor ``S_n >= 1 - sum_{k<=n} (k+n0)^-2``."""
    cases = {ev.stage: ev.case for ev in net.stage_log}
    n0 = net.n0
    S = s_series(net)
    rows = []
    floor = ONE if n0 is not None else None
    for n, s in enumerate(S):
        if n == 0:
            step_ok = s == ONE
            case = None
        else:
            case = cases.get(n - 1)
            allowed = Fraction(1, (n - 1 + n0) ** 2) if (case == 1 and n0 is not None) else ZERO
            step_ok = s >= S[n - 1] - allowed
            if floor is not None:
                floor -= Fraction(1, (n + n0) ** 2)
        ok = step_ok and (floor is None or s >= floor)
        rows.append(SRow(n, s, floor, ok, case, step_ok))
    return rows


def series_floor(n0: int, n: int) -> Fraction:
    return ONE - sum((Fraction(1, (k + n0) ** 2) for k in range(1, n + 1)), ZERO)


# --- per-task trace ----------------------------------------------------------------

def task_trace(net: Network) -> dict[int, dict]:
    """Per task: (re)start stages, mounts, and the reciprocal delays at mounted sources.

    ``u_monotone`` is False only if an edge mounted below an earlier edge of the
    same task, with no restart in between, has a larger reciprocal delay.
    """
    trace: dict[int, dict] = {}
    for ev in net.stage_log:
        if ev.task is None:
            continue
        t = trace.setdefault(ev.task, {"starts": [], "mounts": [], "u": [], "u_monotone": True})
        if ev.case == 1:
            t["starts"].append(ev.stage)
        for e in ev.mounts:
            t["mounts"].append((ev.stage, e.source, e.target))
            t["u"].append(None if e.weight == 0 else 1 / e.weight)
    for task, t in trace.items():
        mounts = t["mounts"]
        for a in range(len(mounts)):
            for b in range(a + 1, len(mounts)):
                (sa, xa, _), (sb, xb, _) = mounts[a], mounts[b]
                restarted = any(sa < s < sb for s in t["starts"])
                if xb.startswith(xa) and xb != xa and not restarted:
                    ua, ub = t["u"][a], t["u"][b]
                    if ua is not None and ub is not None and ub > ua:
                        t["u_monotone"] = False
        t["mount_count"] = len(mounts)
    return trace


# --- miscalibration certificates --------------------------------------------------

def _expected_theta(f, omega: str, rule, nu: int, start: int, stop: int) -> Fraction:
    total = ZERO
    for j in range(start, stop + 1):
        prefix = omega[: j - 1]
        sel = rule(prefix)
        if sel is None:
            raise PartialityError(prefix)
        if sel:
            total += expected_term(f, prefix, int(omega[j - 1]), nu)
    return total


def window_certificate(net: Network, pool, task: int, edge, omega: str) -> dict:
    """Hard-bit, purity and expectation certificates for one edge lying on ``omega``."""
    prog = program_for_task(pool, task)
    f = prog.forecaster
    m, n = len(edge.source), len(edge.target)
    budget = edge.mount_stage if edge.mount_stage is not None else n
    rec = {
        "task": task,
        "program": prog.t,
        "name": prog.name,
        "edge": [edge.source, edge.target],
        "window": [m, n],
        "s": prog.s,
    }
    positions = [j for j in window(task, m) if hard_bit(prog, edge.target, j, budget) == 1]
    rec["hard_count"] = len(positions)
    rec["hard_required"] = i_eff(task) * m
    rec["hard_ok"] = len(positions) >= i_eff(task) * m

    gamma = GammaRule([e for e in net.edges if e.owner == task])
    kappa = prog.kappa
    bound = Fraction(i_eff(task) * m, 4) * (HALF - kappa) - m
    try:
        for j in range(1, n + 1):
            law(f, omega[: j - 1])
        per_nu = {}
        for nu in (0, 1):
            rule = Product((gamma, JRule(prog, nu, budget)))
            selected = []
            for j in range(1, n + 1):
                v = rule(omega[: j - 1])
                if v is None:
                    raise PartialityError(omega[: j - 1])
                if v:
                    selected.append(j)
            per_nu[nu] = {
                "selected": selected,
                "outcomes": sorted({int(omega[j - 1]) for j in selected}),
                "expectation": _expected_theta(f, omega, rule, nu, 1, n),
                "window_expectation": _expected_theta(f, omega, rule, nu, m + 1, n),
            }
    except (ForecasterUndefined, PartialityError) as exc:
        rec["status"] = "partiality excuse"
        rec["detail"] = str(exc)
        return rec

    nu_star = 0 if len(per_nu[0]["selected"]) >= len(per_nu[1]["selected"]) else 1
    sign = 1 if nu_star == 0 else -1
    star = per_nu[nu_star]
    l = len([j for j in star["selected"] if j > m])
    window_bound = Fraction(l, 2) * (HALF - kappa)
    rec.update({
        "status": "certified",
        "nu_star": nu_star,
        "selected_count": {str(nu): len(per_nu[nu]["selected"]) for nu in (0, 1)},
        "selected_positions": {str(nu): per_nu[nu]["selected"] for nu in (0, 1)},
        "selected_outcomes": {str(nu): per_nu[nu]["outcomes"] for nu in (0, 1)},
        "purity_ok": all(set(per_nu[nu]["outcomes"]) <= {1 - nu} for nu in (0, 1)),
        "expectation": {str(nu): per_nu[nu]["expectation"] for nu in (0, 1)},
        "expectation_bound": bound,
        "expectation_ok": sign * star["expectation"] >= bound,
        "window_expectation": star["window_expectation"],
        "window_bound": window_bound,
        "window_ok": sign * star["window_expectation"] >= window_bound,
        "split_half_hard": l * 2 >= len(positions),
    })
    return rec


def sampled_deviations(prog: ForecasterProgram, rule, nu: int, omega: str, seed: int, checkpoints):
    """Realized ``(1/k) theta_k`` at each checkpoint ``k`` with forecasts drawn from the
    forecaster's own law; ``None`` where the rule or forecaster is not defined."""
    out = {}
    forecasts = []
    for k in sorted(set(checkpoints)):
        try:
            while len(forecasts) < k:
                j = len(forecasts)
                forecasts.append(sample_forecast(prog.forecaster, omega[:j], seed))
            out[k] = calib_deviation(omega[:k], forecasts[:k], rule, nu)
        except (ForecasterUndefined, PartialityError):
            out[k] = None
    return out, forecasts


def miscalibration_experiment(net: Network, pool, seed: int, checkpoints=None, omega: str | None = None) -> ExperimentReport:
    """Generate ``omega`` (unless given) and certify every pool program with an edge on it."""
    if omega is None:
        outcome = generate(net, seed)
        if isinstance(outcome, Halted):
            return ExperimentReport(seed, net.digest(), None, outcome.stage, [], [])
        omega = outcome.bits
    checkpoints = sorted(set(checkpoints or [len(omega)]))
    records, traces = [], []
    for prog in pool:
        tasks = sorted({e.owner for e in net.edges
                        if e.owner is not None and program_for_task(pool, e.owner) is prog})
        found = False
        for task in tasks:
            for e in net.edges:
                if e.owner != task or not omega.startswith(e.target):
                    continue
                found = True
                rec = window_certificate(net, pool, task, e, omega)
                if rec["status"] == "certified":
                    gamma = GammaRule([g for g in net.edges if g.owner == task])
                    budget = e.mount_stage or len(e.target)
                    sampled = {}
                    for nu in (0, 1):
                        rule = Product((gamma, JRule(prog, nu, budget)))
                        devs, forecasts = sampled_deviations(prog, rule, nu, omega, seed, checkpoints)
                        sampled[str(nu)] = {str(k): v for k, v in devs.items()}
                        if nu == rec["nu_star"]:
                            try:
                                horizon = len(forecasts)
                                rows = deviation_trace(omega[:horizon], forecasts, rule, nu)
                                traces.append((f"task{task}_{e.source or 'root'}_nu{nu}", rows))
                            except PartialityError:
                                pass
                    rec["sampled_deviation"] = sampled
                records.append(rec)
        if not found:
            records.append({
                "program": prog.t,
                "name": prog.name,
                "status": "no edge on omega; theorem hypothesis unmet",
            })
    return ExperimentReport(seed, net.digest(), omega, None, records, traces, checkpoints)


@dataclass
class ExperimentReport:
    seed: int
    network_digest: str
    omega: str | None
    halted_at: int | None
    records: list[dict]
    traces: list = field(default_factory=list, repr=False)
    checkpoints: list[int] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    @property
    def certified(self) -> list[dict]:
        return [r for r in self.records if r.get("status") == "certified"]

    def to_dict(self) -> dict:
        return {
            "spec_version": REPORT_VERSION,
            "seed": self.seed,
            "network_digest": self.network_digest,
            "omega": self.omega,
            "halted_at": self.halted_at,
            "checkpoints": self.checkpoints,
            "metadata": self.metadata,
            "records": _jsonable(self.records),
        }


def _jsonable(obj):
    if isinstance(obj, Fraction):
        return rat_str(obj)
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


# --- martingale convergence --------------------------------------------------------

@dataclass(frozen=True)
class MartingaleResult:
    empirical: float
    exact: Fraction
    gap: float
    tolerance: float

    @property
    def ok(self) -> bool:
        return abs(self.gap) <= self.tolerance


def martingale_check(f, omega: str, rule, nu: int, trials: int, seed: int) -> MartingaleResult:
    """Compare the trial mean of ``(1/n) theta_{n,nu}`` with its exact expectation.

    Each trial redraws every forecast independently from the forecaster's law
    on the realized prefix. The tolerance is ``3 / (2 sqrt(trials))``.
    """
    n = len(omega)
    if n == 0 or trials < 1:
        raise ValueError("need a nonempty sequence and at least one trial")
    rng = generator(seed, STREAM_TRIALS)
    sums = np.zeros(trials)
    exact = ZERO
    for j in range(1, n + 1):
        prefix = omega[: j - 1]
        sel = rule(prefix)
        if sel is None:
            raise PartialityError(prefix)
        if not sel:
            continue
        dist = law(f, prefix)
        outcome = int(omega[j - 1])
        exact += expected_term(f, prefix, outcome, nu)
        terms = np.array([(outcome - float(v)) if (v >= HALF) == (nu == 1) else 0.0 for v, _ in dist])
        if len(dist) == 1:
            sums += terms[0]
            continue
        den, cum = thresholds([pr for _, pr in dist])
        if den >= 1 << 63:
            raise ValueError("law denominator too large for vectorized sampling")
        u = rng.integers(0, den, size=trials)
        idx = np.searchsorted(np.array(cum[:-1]), u, side="right")
        sums += terms[idx]
    empirical = float(sums.mean()) / n
    exact /= n
    return MartingaleResult(empirical, exact, empirical - float(exact), 3 / (2 * math.sqrt(trials)))
