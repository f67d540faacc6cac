"""
Beating a deterministic forecaster
==================================

Against a forecaster we can run, choose 1 whenever it says less than 1/2
and 0 otherwise. It is then miscalibrated by at least 1/4.
"""
from fractions import Fraction as F

from noncalib import Always, Constant, Laplace, Markov, Parity, calib_deviation, oakes_sequence

for f in [Constant(F(1, 2)), Laplace(), Markov(2), Parity()]:
    omega, forecasts = oakes_sequence(f, 2000)
    devs = [calib_deviation(omega, forecasts, Always(), nu) for nu in (0, 1)]
    print(type(f).__name__, omega[:16], [round(float(d), 4) for d in devs])
