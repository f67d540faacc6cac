"""
Flows and semimeasures on a small network
=========================================

A network delays part of the mass at some nodes and can carry it further
down the tree along an extra edge.
"""
from fractions import Fraction as F

from noncalib import Edge, Network, bar_Q, flow_R, semimeasure_Q, support_member, validate
from noncalib.core import level

# delay a quarter of the mass at the root, then return it two levels lower at "00"
net = Network(2, {"": F(1, 4)}, [Edge("", "00", F(1, 4))])
print("valid:", validate(net).ok)

for n in range(3):
    print(n, {x: str(flow_R(net, x)) for x in level(n)})

# Q is the least semimeasure above R, so Q("0") collects what arrives below it
print("Q(0) =", semimeasure_Q(net, "0"), " barQ(root) =", bar_Q(net, ""))

# a node with d = 1 and no edge leaving it cuts off everything underneath
blocked = Network(3, {"0": F(1)})
print("support_member('00'):", support_member(blocked, "00"), " Q('00') =", semimeasure_Q(blocked, "00"))

# outflow above one is rejected
print(validate(Network(3, {"0": F(1, 3)}, [Edge("0", "000", F(1, 2))])).violations)
