"""Selection rules, calibration deviations and the deterministic Oakes adversary.

A selection rule is a callable on outcome prefixes returning 0, 1, or
``None`` while its value is still pending.
"""
from __future__ import annotations

import csv
from fractions import Fraction

from .core import HALF, ZERO, check_bits, indicator, rat_str
from .forecasters import ForecasterProgram, Forecaster, approx_below, law


class PartialityError(RuntimeError):
    def __init__(self, prefix: str, what: str = "selection rule"):
        super().__init__(f"{what} pending on prefix {prefix!r}")
        self.prefix = prefix


class SelectionRule:
    def __call__(self, prefix: str) -> int | None:
        raise NotImplementedError

    def __mul__(self, other):
        return Product((self, other))


class Always(SelectionRule):
    def __call__(self, prefix):
        return 1


class Never(SelectionRule):
    def __call__(self, prefix):
        return 0


class GammaRule(SelectionRule):
    """Fires before annotated hard positions strictly inside the given edges.

    ``edges`` are objects with ``source``, ``target`` and ``hard_positions``
    (1-based positions in ``target``). The rule is 1 on ``prefix`` iff some
    edge has ``source ⊑ prefix ⊏ target`` and ``l(prefix) + 1`` annotated.
    """

    def __init__(self, edges):
        self.edges = list(edges)
        claims: dict[tuple[str, str], bool] = {}
        for e in self.edges:
            hard = set(e.hard_positions)
            for j in range(len(e.source) + 1, len(e.target) + 1):
                key = (e.target[: j - 1], e.target[j - 1])
                flag = j in hard
                if claims.setdefault(key, flag) != flag:
                    raise ValueError(
                        f"contradictory hard-bit annotations at position {j} after {key[0]!r}"
                    )

    def __call__(self, prefix):
        j = len(prefix) + 1
        for e in self.edges:
            if len(e.source) <= len(prefix) < len(e.target) and e.target.startswith(prefix) \
                    and prefix.startswith(e.source) and j in e.hard_positions:
                return 1
        return 0


def gamma_rule(edges, prefix: str) -> int:
    return GammaRule(edges)(prefix)


class JRule(SelectionRule):
    """``1 - nu`` below 1/2 and ``nu`` at or above 1/2 of the program's approximation."""

    def __init__(self, prog: ForecasterProgram, nu: int, budget: int):
        if nu not in (0, 1):
            raise ValueError("nu must be 0 or 1")
        self.prog, self.nu, self.budget = prog, nu, budget

    def __call__(self, prefix):
        r = approx_below(self.prog, prefix, self.budget)
        if r is None:
            return None
        return self.nu if r >= HALF else 1 - self.nu


def j_rule(prog: ForecasterProgram, nu: int, prefix: str, budget: int) -> int | None:
    return JRule(prog, nu, budget)(prefix)


class Product(SelectionRule):
    def __init__(self, rules):
        self.rules = tuple(rules)

    def __call__(self, prefix):
        values = [r(prefix) for r in self.rules]
        if any(v is None for v in values):
            return None
        out = 1
        for v in values:
            out *= v
        return out


def _selected(rule, prefix: str) -> int:
    v = rule(prefix)
    if v is None:
        raise PartialityError(prefix)
    return v


def deviation_terms(omega: str, forecasts, rule, nu: int):
    """Yield ``(step, selected, forecast, outcome, term)`` for each step."""
    check_bits(omega)
    if len(forecasts) != len(omega):
        raise ValueError("need exactly one forecast per outcome")
    for j, (bit, p) in enumerate(zip(omega, forecasts), start=1):
        sel = _selected(rule, omega[: j - 1]) * indicator(nu, p)
        outcome = int(bit)
        yield j, sel, p, outcome, (outcome - p) if sel else ZERO


def calib_deviation(omega: str, forecasts, rule, nu: int) -> Fraction:
    """``(1/n) * sum_j rule(omega^{j-1}) I_nu(p_j) (omega_j - p_j)``, signed and exact."""
    if not omega:
        raise ValueError("empty outcome sequence")
    total = sum((t[4] for t in deviation_terms(omega, forecasts, rule, nu)), ZERO)
    return total / len(omega)


def deviation_trace(omega: str, forecasts, rule, nu: int) -> list[dict]:
    rows, running = [], ZERO
    for j, sel, p, outcome, term in deviation_terms(omega, forecasts, rule, nu):
        running += term
        rows.append({
            "step": j,
            "selected": sel,
            "forecast": p,
            "outcome": outcome,
            "term": term,
            "running_deviation": running / j,
        })
    return rows


TRACE_COLUMNS = ["step", "selected", "forecast", "outcome", "term", "running_deviation"]


def write_trace_csv(rows, fh):
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(TRACE_COLUMNS)
    for r in rows:
        writer.writerow([
            r["step"], r["selected"], rat_str(r["forecast"]), r["outcome"],
            rat_str(r["term"]), rat_str(r["running_deviation"]),
        ])


def oakes_sequence(f: Forecaster, n: int) -> tuple[str, list[Fraction]]:
    """Outcome 1 whenever ``f`` forecasts below 1/2, else 0."""
    bits, forecasts = [], []
    omega = ""
    for _ in range(n):
        dist = law(f, omega) if f.steps(omega) is not None else None
        if dist is None:
            raise PartialityError(omega, "forecaster")
        if len(dist) != 1:
            raise ValueError("oakes_sequence needs a deterministic forecaster")
        p = dist[0][0]
        forecasts.append(p)
        bits.append("1" if p < HALF else "0")
        omega += bits[-1]
    return omega, forecasts
