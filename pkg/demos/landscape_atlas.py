"""
Mapping a cost landscape
========================

Run many local solves from random starts, merge the ones that land on the
same minimum, and embed the distinct minima in the plane.  The fraction of
runs reaching the most popular minimum (pct_max) is a simple difficulty
score: near 100 means one minimum dominates.
"""

import numpy as np

from rotland import atlas, graphmodel, solver

opts = solver.SolveOptions(p=2)
for sigma in (2, 25):
    vg, _ = graphmodel.make_instance("ws", 24, k=8, p_rewire=0.5, sigma_n=np.radians(sigma), seed=0)
    at = atlas.build_atlas(vg, opts, n_restarts=40, seed=0)
    costs = [m.cost for m in at.minima]
    print("sigma_n = %2d deg: %2d distinct minima, pct_max %.1f, best cost %.3f, worst %.3f"
          % (sigma, at.n_minima, at.pct_max, min(costs), max(costs)))

# atlas.json, atlas.csv and a scatter plot in atlas.svg
atlas.write_atlas(at, "atlas_demo")
print("wrote atlas_demo/")
