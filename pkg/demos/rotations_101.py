"""
Rotations, distances and the gauge
==================================

A short tour of the SO(3) layer: exponential and logarithm maps, the two
distances between rotations, and why a whole solution can be rotated
without changing its cost.
"""

import numpy as np

from rotland import gauge, graphmodel, so3
from rotland.cost import cost

rng = np.random.default_rng(0)

# An angle-axis vector maps to a rotation and back.
v = np.array([0.3, -1.2, 0.5])
R = so3.exp_map(v)
print("log(exp(v)) - v =", so3.log_map(R) - v)

# Geodesic distance is the rotation angle of R^T S.  The chordal (Frobenius)
# distance is a monotone function of it.
a, b = so3.random_uniform(rng, (2, 5))
geo = so3.geodesic_distance(a, b)
chord = so3.chordal_distance(a, b)
for g, c in zip(geo, chord):
    print("geodesic %.4f  chordal %.4f  2*sqrt(2)*sin(geo/2) %.4f" % (g, c, 2 * np.sqrt(2) * np.sin(g / 2)))

# A noisy problem on a small-world graph.
vg, truth = graphmodel.make_instance("ws", 20, k=6, p_rewire=0.2, sigma_n=np.radians(5), seed=1)
print("\n%d vertices, %d edges, lambda2 = %.3f" % (vg.n, vg.m, graphmodel.algebraic_connectivity(vg)))

# Right-multiplying every rotation by the same S leaves the cost alone.
S = so3.random_uniform(rng)
print("cost at truth       %.6f" % cost(vg, truth))
print("cost at truth @ S   %.6f" % cost(vg, truth @ S))

# The quotient distance removes that ambiguity before comparing solutions.
print("quotient distance(truth, truth @ S) = %.2e" % gauge.quotient_distance(truth, truth @ S))
