"""
Building the adversarial network
================================

Each forecaster in the pool gets its own task. A task delays a little mass
and later sends it to an extension of the tree that the forecaster gets
wrong.
"""
from fractions import Fraction as F

from noncalib import BuildParams, Constant, ForecasterProgram, Laplace, build_network, validate
from noncalib.analysis import audit_S_series, certify_mounts, task_trace
from noncalib.construction import stage_audit

pool = [ForecasterProgram(0, Constant(F(7, 10)), 4), ForecasterProgram(1, Laplace(), 4)]
net = build_network(BuildParams(depth=14, eps=F(1, 10), pool=pool))

for line in stage_audit(net):
    print(line)

print("valid:", validate(net).ok)

# recount the hard bits on every edge without trusting the builder's record
for rec in certify_mounts(net, pool):
    print(rec["source"], "->", rec["target"], "hard", rec["hard_count"], ">=", rec["required"])

# the mass that can reach depth n never drops below 1 - sum (k + n0)^-2
rows = audit_S_series(net)
print("S_N =", float(rows[-1].S), "floor", float(rows[-1].bound), "all ok:", all(r.ok for r in rows))

for task, t in sorted(task_trace(net).items()):
    print("task", task, "starts", t["starts"], "mounts", t["mount_count"])
