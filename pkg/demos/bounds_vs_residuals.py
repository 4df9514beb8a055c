"""
How the convexity bounds degrade with residual size
===================================================

On complete graphs with every residual set to the same angle, the three
tests can be compared directly.  The separated bound uses only the
unweighted graph spectrum, the normalized bound also uses per-edge
weights, and the exact test uses the full Hessian.
"""

import numpy as np

from rotland import certify, graphmodel, so3
from rotland.graphmodel import ViewGraph


def uniform_instance(n, theta, rng):
    edges = graphmodel.complete_graph(n)
    T = so3.random_uniform(rng, n)
    w = rng.normal(size=(len(edges), 3))
    w /= np.linalg.norm(w, axis=1, keepdims=True)
    R = T[edges[:, 0]] @ so3.exp_map(theta * w) @ np.swapaxes(T[edges[:, 1]], 1, 2)
    return ViewGraph(n, edges, R), T


rng = np.random.default_rng(0)
print(" theta   exact_min  lnorm_min  separated lhs/rhs")
for theta in (0.1, 0.5, 0.9, 1.2, 1.6, 2.2):
    vg, T = uniform_instance(6, theta, rng)
    rep = certify.certify(vg, T, p=2)
    sep = "error" if "separated" in rep.errors else "%.2f/%.2f" % (rep.separated_lhs, rep.separated_rhs)
    lnorm = "error" if rep.lnorm_min is None else "%.3f" % rep.lnorm_min
    print("%6.2f %10.3f %10s  %s" % (theta, rep.exact_min_eig, lnorm, sep))

# Every row respects separated => lnorm => exact.
