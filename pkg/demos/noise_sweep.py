"""
Difficulty versus noise and connectivity
========================================

A small grid of graphs and noise levels.  Better-connected graphs (larger
lambda2) and lower noise tend to give a dominant minimum.
"""

from rotland import atlas, graphmodel, solver

GRAPHS = [("ws", dict(k=4, p_rewire=0.0)), ("ws", dict(k=8, p_rewire=0.5)), ("gnm", dict(m=150))]
SIGMAS = (2.0, 15.0, 30.0)

cells = []
for gi, (kind, kw) in enumerate(GRAPHS):
    for sig in SIGMAS:
        vg, _ = graphmodel.make_instance(kind, 24, sigma_n=sig * 3.141592653589793 / 180, seed=0, **kw)
        cells.append(("%s%d" % (kind, gi), 0, sig, vg))

rows = atlas.sweep(cells, solver.SolveOptions(), n_restarts=30)
print("graph  lambda2  sigma_n  pct_max  minima")
for r in rows:
    print("%-5s %8.3f %8.1f %8.1f %7d" % (r.label, r.lambda2, r.sigma_n_deg, r.pct_max, r.n_minima))
atlas.write_sweep_csv(rows, "sweep_demo.csv")
