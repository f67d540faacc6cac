"""
Randomized forecasts and their expected deviation
=================================================

A randomized forecaster's deviation concentrates around its exact
expectation as the number of trials grows.
"""
from fractions import Fraction as F

import numpy as np

from noncalib import Always, TwoPoint
from noncalib.analysis import martingale_check

f = TwoPoint(F(3, 10), F(6, 10), F(1, 2))
omega = "".join(np.random.default_rng(0).choice(["0", "1"], size=500))

for trials in (10, 100, 1000, 10000):
    res = martingale_check(f, omega, Always(), 1, trials, seed=5)
    print(f"{trials:>6} trials  empirical {res.empirical:+.5f}  exact {float(res.exact):+.5f}  "
          f"gap {res.gap:+.5f}  tolerance {res.tolerance:.5f}")
