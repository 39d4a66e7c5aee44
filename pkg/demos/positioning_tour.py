"""
Steering bacteria with three beacons
====================================

A bacterium is given three target concentrations, one per beacon. Each
receptor stops attracting once its target is reached, so the swarm gathers
where all three are met. Precision is good inside the beacon triangle and
falls off outside it.
"""

import math

import numpy as np

from dnaarchive.engine import SimConfig, circle_points, positioning_triad, run_positioning
from dnaarchive.field import targets_for, trilaterate

config = SimConfig(n_positioning_bacteria=50)
triad = positioning_triad(config)
bary = triad.barycentre
print("beacons:", np.round(triad.vertices, 4).tolist())

###############################################################################
# Targets are the concentrations measured at the destination, and the
# destination can be read back from them

dest = (0.03, 0.01)
t = targets_for(triad, dest)
print("targets:", np.round(t.values, 6), "->", np.round(trilaterate(triad, t.values)[0], 6))

###############################################################################
# Release at 0.3 cm below the barycentre and aim at points further and
# further above it; the triangle's upper edge is only 0.07 cm above centre

start = circle_points(bary, 0.300, 1, -math.pi / 2)[0]
for r in (0.030, 0.087, 0.200):
    dest = circle_points(bary, r, 1, math.pi / 2)[0]
    rec = run_positioning(config, start, dest)
    inside = "inside " if triad.contains(dest) else "outside"
    print(f"destination {r:.3f} cm from centre ({inside}): "
          f"error {rec.positioning_error_cm:.4f} +/- {rec.positioning_error_std_cm:.4f} cm")
