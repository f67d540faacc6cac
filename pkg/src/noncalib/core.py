"""Binary strings, exact rationals, pairing and the stage schedule.

Finite binary sequences are plain ``str`` objects over ``"0"``/``"1"``; the
empty string is the empty sequence. Every numeric quantity that enters a flow
or a forecast is a :class:`fractions.Fraction`.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import product
from math import isqrt

ZERO = Fraction(0)
ONE = Fraction(1)
HALF = Fraction(1, 2)


def check_bits(x: str) -> str:
    if not isinstance(x, str) or x.strip("01"):
        raise ValueError(f"not a binary sequence: {x!r}")
    return x


def is_prefix(x: str, y: str) -> bool:
    """``x ⊑ y``."""
    return y.startswith(x)


def is_proper_prefix(x: str, y: str) -> bool:
    return len(x) < len(y) and y.startswith(x)


def prefixes(x: str, proper: bool = False):
    """Yield ``x^0, x^1, ...`` up to ``x`` itself (or ``x^{l(x)-1}`` if proper)."""
    stop = len(x) if proper else len(x) + 1
    for k in range(stop):
        yield x[:k]


def level(n: int):
    """All binary strings of length ``n`` in lexicographic order."""
    if n == 0:
        yield ""
        return
    for bits in product("01", repeat=n):
        yield "".join(bits)


def subtree_level(x: str, n: int):
    """Descendants of ``x`` with length ``n`` (``n >= l(x)``), lexicographic."""
    for tail in level(n - len(x)):
        yield x + tail


def rat(value) -> Fraction:
    """Parse ``"num/den"``, an int, a decimal string or a Fraction."""
    if isinstance(value, float):
        raise TypeError("floats are not accepted; pass 'num/den'")
    return Fraction(value)


def rat_str(q: Fraction) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def pair(t: int, s: int) -> int:
    """Cantor pairing ``<t, s>``."""
    if t < 0 or s < 0:
        raise ValueError("pair arguments must be nonnegative")
    return (t + s) * (t + s + 1) // 2 + s


def unpair(i: int) -> tuple[int, int]:
    if i < 0:
        raise ValueError("unpair argument must be nonnegative")
    w = (isqrt(8 * i + 1) - 1) // 2
    s = i - w * (w + 1) // 2
    return w - s, s


def schedule(n: int) -> int:
    """Task visited at stage ``n``: the first coordinate of ``unpair(n - 1)``.

    Every task index recurs infinitely often along ``n = 1, 2, ...``.
    """
    if n < 1:
        raise ValueError("stages start at n = 1")
    return unpair(n - 1)[0]


def task_stages(i: int):
    """Stages ``n`` with ``schedule(n) == i``, increasing (infinite)."""
    k = 0
    while True:
        yield pair(i, k) + 1
        k += 1


def indicator(nu: int, p: Fraction) -> int:
    """``I_0`` of ``[0, 1/2)`` and ``I_1`` of ``[1/2, 1]``."""
    if nu not in (0, 1):
        raise ValueError("nu must be 0 or 1")
    if not 0 <= p <= 1:
        raise ValueError(f"forecast outside [0, 1]: {p}")
    upper = p >= HALF
    return int(upper) if nu == 1 else int(not upper)
