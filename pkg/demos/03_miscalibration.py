"""
Catching a forecaster on a generated sequence
=============================================

Sample an outcome sequence from the network and look at the window of an
extra edge it followed. The selection rule picks out the hard bits.
"""
from fractions import Fraction as F

from noncalib import BuildParams, Constant, ForecasterProgram, build_network, generate
from noncalib.analysis import miscalibration_experiment

pool = [ForecasterProgram(0, Constant(F(7, 10)), 4)]
net = build_network(BuildParams(depth=12, pool=pool))

print([str(generate(net, seed)) for seed in range(5)])

# seed 1 happens to follow the edge 0 -> 000000
report = miscalibration_experiment(net, pool, seed=1, checkpoints=[6, 12])
print("omega:", report.omega)
for rec in report.records:
    print(rec["status"], rec.get("edge"))
    if rec["status"] == "certified":
        nu = str(rec["nu_star"])
        print("  nu* =", nu, "selected", rec["selected_positions"][nu], "outcomes", rec["selected_outcomes"][nu])
        print("  E(theta) =", rec["expectation"][nu], "bound", rec["expectation_bound"])
        print("  sampled deviation", {k: str(v) for k, v in rec["sampled_deviation"][nu].items()})
