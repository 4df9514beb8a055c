"""Command-line interface: ``rotland generate|solve|map|certify|sweep``.

Exit codes: 0 success, 2 usage or input error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__, atlas, certify, graphmodel, so3, solver
from .cost import hessian
from .errors import InvalidParam, RotlandError

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 2, 3


class UsageError(Exception):
    pass


def _meta(args, **extra) -> dict:
    flags = {k: v for k, v in vars(args).items() if k != "func"}
    d = {"command": args.command, "flags": flags, "version": __version__}
    d.update(extra)
    return d


def _truth_path(problem: Path) -> Path:
    return problem.with_name(problem.stem + ".truth.json")


def _load_problem(path):
    try:
        return graphmodel.read_problem(path)
    except (OSError, json.JSONDecodeError, InvalidParam, RotlandError) as exc:
        raise UsageError("cannot read problem %s: %s" % (path, exc)) from exc


def _load_solution(path, n):
    try:
        sol = graphmodel.read_solution(path)
    except (OSError, json.JSONDecodeError, InvalidParam) as exc:
        raise UsageError("cannot read solution %s: %s" % (path, exc)) from exc
    if sol.shape != (n, 3, 3):
        raise UsageError("solution has %d rotations, problem has %d vertices" % (len(sol), n))
    return sol


def cmd_generate(args) -> int:
    if args.graph == "ws" and (args.k is None or args.p_rewire is None):
        raise UsageError("--graph ws requires --k and --p-rewire")
    if args.graph == "gnm" and args.m is None:
        raise UsageError("--graph gnm requires --m")
    try:
        vg, truth = graphmodel.make_instance(
            args.graph, args.n, k=args.k, p_rewire=args.p_rewire, m=args.m,
            sigma_n=math.radians(args.sigma_n_deg), outlier_fraction=args.outlier_frac, seed=args.seed)
    except InvalidParam as exc:
        raise UsageError(str(exc)) from exc
    meta = dict(vg.meta)
    meta.update(_meta(args))
    vg = graphmodel.ViewGraph(vg.n, vg.edges, vg.R, meta)
    out = Path(args.out)
    graphmodel.write_problem(vg, out)
    graphmodel.write_solution(truth, _truth_path(out), meta={"ground_truth_of": out.name})
    print("wrote %s: n=%d, %d edges, lambda2=%.4f" % (out, vg.n, vg.m, graphmodel.algebraic_connectivity(vg)))
    return EXIT_OK


def cmd_solve(args) -> int:
    vg = _load_problem(args.problem)
    if args.init == "ground-truth":
        init = _load_solution(args.truth or _truth_path(Path(args.problem)), vg.n)
    elif args.init == "file":
        if not args.init_file:
            raise UsageError("--init file requires --init-file")
        init = _load_solution(args.init_file, vg.n)
    else:
        init = so3.random_uniform(np.random.default_rng(args.seed), vg.n)
    opts = solver.SolveOptions(p=args.p, max_iters=args.max_iters, grad_tol=args.grad_tol, seed=args.seed)
    res = solver.solve_local(vg, init, opts)
    print("final cost %.17g" % res.final_cost)
    print("converged %s after %d iterations (%s), |grad|_inf = %.3e"
          % (res.converged, res.iters, res.status, res.final_grad_norm))
    if args.out:
        out = Path(args.out)
        graphmodel.write_solution(res.solution, out, meta=_meta(args))
        rec = res.record()
        rec["meta"] = _meta(args)
        out.with_name(out.stem + ".result.json").write_text(json.dumps(rec, indent=1))
    return EXIT_OK if res.converged else EXIT_NUMERIC


def cmd_map(args) -> int:
    if args.sigma_d <= 0:
        raise UsageError("--sigma-d must be positive")
    if args.merge_tol <= 0:
        raise UsageError("--merge-tol must be positive")
    if args.restarts < 1:
        raise UsageError("--restarts must be at least 1")
    vg = _load_problem(args.problem)
    opts = solver.SolveOptions(p=args.p, seed=args.seed)
    try:
        at = atlas.build_atlas(vg, opts, args.restarts, args.merge_tol, args.sigma_d, args.seed,
                               kernel_squared=args.kernel_squared)
    except RotlandError as exc:
        print("map failed: %s" % exc, file=sys.stderr)
        return EXIT_NUMERIC
    at.meta.update(_meta(args))
    atlas.write_atlas(at, args.out_dir)
    print("pct_max %.1f" % at.pct_max)
    print("%d distinct minima from %d runs (%d not converged)"
          % (at.n_minima, at.n_runs, len(at.non_converged)))
    return EXIT_OK


def cmd_certify(args) -> int:
    vg = _load_problem(args.problem)
    sol = _load_solution(args.solution, vg.n)
    if args.p <= 1:
        raise UsageError("--p must exceed 1")
    rep = certify.certify(vg, sol, args.p)
    for line in rep.verdict_lines():
        print(line)
    if args.out:
        certify.write_report(rep, args.out, meta=_meta(args))
    if args.hessian_csv:
        np.savetxt(args.hessian_csv, hessian(vg, sol, args.p), delimiter=",", fmt="%.17g")
    return EXIT_OK


def _load_sweep_spec(path) -> dict:
    try:
        spec = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError("cannot read sweep spec %s: %s" % (path, exc)) from exc
    if not isinstance(spec, dict) or not spec.get("graphs") or not spec.get("sigma_n_deg"):
        raise UsageError("sweep spec needs non-empty 'graphs' and 'sigma_n_deg' lists")
    return spec


def sweep_cells(spec: dict):
    """``(label, seed, sigma_deg, vg)`` for every graph x seed x noise cell of a sweep spec."""
    seeds = spec.get("seeds", [0])
    for gi, g in enumerate(spec["graphs"]):
        g = dict(g)
        kind = g.pop("graph")
        n = g.pop("n")
        for seed in seeds:
            for sig in spec["sigma_n_deg"]:
                vg, _ = graphmodel.make_instance(
                    kind, n, sigma_n=math.radians(sig), outlier_fraction=spec.get("outlier_frac", 0.0),
                    seed=seed, **g)
                label = "g%d_%s_s%d_sig%g" % (gi, kind, seed, sig)
                yield label, seed, sig, vg


def cmd_sweep(args) -> int:
    spec = _load_sweep_spec(args.spec)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    opts = solver.SolveOptions(p=spec.get("p", 2.0))

    def save(row, at):
        at.meta.update({"cell": row.label, "sweep_spec": spec})
        atlas.write_atlas(at, out / row.label)

    try:
        cells = list(sweep_cells(spec))
    except (InvalidParam, TypeError, KeyError) as exc:
        raise UsageError("bad sweep spec: %s" % exc) from exc
    rows = atlas.sweep(cells, opts, spec.get("restarts", 200), spec.get("merge_tol", atlas.DEFAULT_MERGE_TOL),
                       spec.get("sigma_d", atlas.DEFAULT_SIGMA_D), on_cell=save)
    atlas.write_sweep_csv(rows, out / "sweep.csv")
    (out / "sweep_meta.json").write_text(json.dumps(_meta(args, spec=spec), indent=1))
    for r in rows:
        print("%-28s lambda2=%7.3f sigma_n=%5.1f deg pct_max=%5.1f minima=%d %s"
              % (r.label, r.lambda2, r.sigma_n_deg, r.pct_max, r.n_minima, r.error))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rotland", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version="rotland " + __version__)
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a synthetic problem file")
    g.add_argument("--graph", choices=["ws", "gnm", "cycle", "complete", "tree"], required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--k", type=int)
    g.add_argument("--p-rewire", type=float)
    g.add_argument("--m", type=int)
    g.add_argument("--sigma-n-deg", type=float, default=0.0)
    g.add_argument("--outlier-frac", type=float, default=0.0)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", default="problem.json")
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("solve", help="one local solve")
    s.add_argument("--problem", required=True)
    s.add_argument("--p", type=float, default=2.0)
    s.add_argument("--init", choices=["random", "ground-truth", "file"], default="random")
    s.add_argument("--init-file")
    s.add_argument("--truth", help="ground truth file (default: <problem>.truth.json)")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--max-iters", type=int, default=200)
    s.add_argument("--grad-tol", type=float, default=1e-8)
    s.add_argument("--out")
    s.set_defaults(func=cmd_solve)

    mp = sub.add_parser("map", help="random-restart campaign and minima atlas")
    mp.add_argument("--problem", required=True)
    mp.add_argument("--p", type=float, default=2.0)
    mp.add_argument("--restarts", type=int, default=200)
    mp.add_argument("--merge-tol", type=float, default=atlas.DEFAULT_MERGE_TOL)
    mp.add_argument("--sigma-d", type=float, default=atlas.DEFAULT_SIGMA_D)
    mp.add_argument("--kernel-squared", action="store_true", help="use exp(-d^2/sigma_d^2)")
    mp.add_argument("--seed", type=int, default=0)
    mp.add_argument("--out-dir", default="atlas")
    mp.set_defaults(func=cmd_map)

    c = sub.add_parser("certify", help="local convexity report")
    c.add_argument("--problem", required=True)
    c.add_argument("--solution", required=True)
    c.add_argument("--p", type=float, default=2.0)
    c.add_argument("--out")
    c.add_argument("--hessian-csv", help="also dump the full Hessian as CSV")
    c.set_defaults(func=cmd_certify)

    sw = sub.add_parser("sweep", help="pct_max over graphs x noise levels")
    sw.add_argument("--spec", required=True)
    sw.add_argument("--out-dir", default="sweep")
    sw.set_defaults(func=cmd_sweep)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print("rotland %s: error: %s" % (args.command, exc), file=sys.stderr)
        return EXIT_USAGE
    except InvalidParam as exc:
        print("rotland %s: error: %s" % (args.command, exc), file=sys.stderr)
        return EXIT_USAGE
    except RotlandError as exc:
        print("rotland %s: numerical failure: %s" % (args.command, exc), file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
