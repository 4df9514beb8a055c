"""Landscape mapping: deduplicate campaign minima, embed them in 2D, summarize.

A campaign of random-restart solves is reduced to distinct minima by
single-linkage clustering under the quotient distance.  The
representatives are then embedded with a diffusion map built from the
kernel ``exp(-d^2 / sigma_d)``.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.sparse.csgraph import connected_components

from . import __version__
from .errors import InvalidParam, RotlandError
from .gauge import pairwise_quotient_distances
from .graphmodel import algebraic_connectivity
from .numerics import sym_eig
from .solver import SolveOptions, random_restart_campaign

DEFAULT_MERGE_TOL = 0.01
DEFAULT_SIGMA_D = math.pi / 4


@dataclass
class Clusters:
    labels: np.ndarray  # cluster id per input solution
    representatives: list  # input index of the lowest-cost member, per cluster
    multiplicity: list


def dedup(solutions, costs, merge_tol: float = DEFAULT_MERGE_TOL, dist: np.ndarray | None = None) -> Clusters:
    """Single-linkage clusters of solutions whose quotient distance is below ``merge_tol``.

    Clusters are ordered by the cost of their representative.
    """
    if merge_tol <= 0:
        raise InvalidParam("merge_tol must be positive")
    costs = np.asarray(costs, dtype=float)
    N = len(costs)
    if N == 0:
        return Clusters(np.zeros(0, dtype=int), [], [])
    if dist is None:
        dist, _ = pairwise_quotient_distances(solutions)
    adj = (dist < merge_tol).astype(np.int8)
    _, raw = connected_components(adj, directed=False)
    reps = {}
    for k in range(N):
        c = raw[k]
        if c not in reps or costs[k] < costs[reps[c]]:
            reps[c] = k
    order = sorted(reps, key=lambda c: (costs[reps[c]], reps[c]))
    relabel = {c: new for new, c in enumerate(order)}
    labels = np.array([relabel[c] for c in raw])
    return Clusters(labels, [reps[c] for c in order], [int(np.sum(labels == i)) for i in range(len(order))])


def diffusion_kernel(dist: np.ndarray, sigma_d: float = DEFAULT_SIGMA_D, squared: bool = False) -> np.ndarray:
    """``exp(-d^2 / sigma_d)``, or ``exp(-d^2 / sigma_d^2)`` when ``squared``."""
    if sigma_d <= 0:
        raise InvalidParam("sigma_d must be positive")
    scale = sigma_d * sigma_d if squared else sigma_d
    return np.exp(-np.asarray(dist, dtype=float) ** 2 / scale)


def embed(dist: np.ndarray, sigma_d: float = DEFAULT_SIGMA_D, squared: bool = False, t: int = 1) -> np.ndarray:
    """Diffusion-map coordinates ``(N, 2)`` for a distance matrix.

    The kernel is degree-normalized into a Markov matrix; coordinates are the
    second and third right eigenvectors scaled by ``lambda_k ** t``.  Each
    axis is signed so that its largest-magnitude entry is positive.
    """
    dist = np.asarray(dist, dtype=float)
    if dist.ndim != 2 or dist.shape[0] != dist.shape[1]:
        raise InvalidParam("distance matrix must be square")
    if np.any(dist < 0) or not np.allclose(dist, dist.T, atol=1e-8) or np.any(np.abs(np.diag(dist)) > 1e-12):
        raise InvalidParam("distance matrix must be symmetric, nonnegative, zero on the diagonal")
    N = dist.shape[0]
    out = np.zeros((N, 2))
    if N < 2:
        return out
    K = diffusion_kernel(dist, sigma_d, squared)
    deg = K.sum(axis=1)
    dh = 1.0 / np.sqrt(deg)
    A = dh[:, None] * K * dh[None, :]
    w, v = sym_eig(A)
    w, v = w[::-1], v[:, ::-1]
    psi = dh[:, None] * v  # right eigenvectors of D^-1 K
    # unit norm in the stationary (degree-weighted) inner product
    psi /= np.sqrt(np.sum(deg[:, None] * psi * psi, axis=0) / deg.sum())
    ncoord = min(2, N - 1)
    coords = psi[:, 1:1 + ncoord] * (w[1:1 + ncoord] ** t)
    for a in range(ncoord):
        col = coords[:, a]
        k = int(np.argmax(np.abs(col)))
        if col[k] < 0:
            coords[:, a] = -col
    out[:, :ncoord] = coords
    return out


@dataclass
class Minimum:
    solution: np.ndarray
    cost: float
    multiplicity: int
    run_indices: list


@dataclass
class MinimaAtlas:
    minima: list
    dist: np.ndarray
    embedding: np.ndarray
    pct_max: float
    n_runs: int
    non_converged: list = field(default_factory=list)
    flagged_pairs: int = 0
    meta: dict = field(default_factory=dict)

    @property
    def n_minima(self) -> int:
        return len(self.minima)

    def to_dict(self) -> dict:
        return {
            "pct_max": self.pct_max,
            "n_minima": self.n_minima,
            "n_runs": self.n_runs,
            "n_converged": self.n_runs - len(self.non_converged),
            "non_converged_runs": self.non_converged,
            "flagged_alignment_pairs": self.flagged_pairs,
            "pct_max_basis": "converged runs only",
            "minima": [
                {"id": k, "cost": m.cost, "multiplicity": m.multiplicity,
                 "x": float(self.embedding[k, 0]), "y": float(self.embedding[k, 1]),
                 "runs": m.run_indices}
                for k, m in enumerate(self.minima)
            ],
            "dist": self.dist.tolist(),
            "meta": self.meta,
        }


def atlas_from_results(results: list, merge_tol: float = DEFAULT_MERGE_TOL, sigma_d: float = DEFAULT_SIGMA_D,
                       kernel_squared: bool = False, meta: dict | None = None) -> MinimaAtlas:
    """Dedup, distance matrix, embedding and statistics for finished solves."""
    ok = [k for k, r in enumerate(results) if r.converged]
    bad = [k for k, r in enumerate(results) if not r.converged]
    if not ok:
        raise RotlandError("no run converged; atlas undefined")
    sols = np.stack([results[k].solution for k in ok])
    costs = np.array([results[k].final_cost for k in ok])
    D, pair_ok = pairwise_quotient_distances(sols)
    cl = dedup(sols, costs, merge_tol, dist=D)
    reps = cl.representatives
    minima = [Minimum(sols[r], float(costs[r]), cl.multiplicity[c],
                      [ok[k] for k in np.flatnonzero(cl.labels == c)])
              for c, r in enumerate(reps)]
    dist = D[np.ix_(reps, reps)]
    emb = embed(dist, sigma_d, kernel_squared)
    pct = 100.0 * max(cl.multiplicity) / len(ok)
    flagged = int(np.sum(~pair_ok[np.triu_indices(len(ok), 1)]))
    info = {"merge_tol": merge_tol, "sigma_d": sigma_d, "kernel_squared": kernel_squared, "version": __version__}
    info.update(meta or {})
    return MinimaAtlas(minima, dist, emb, pct, len(results), bad, flagged, info)


def build_atlas(vg, opts: SolveOptions = SolveOptions(), n_restarts: int = 200,
                merge_tol: float = DEFAULT_MERGE_TOL, sigma_d: float = DEFAULT_SIGMA_D,
                seed: int | None = None, kernel_squared: bool = False) -> MinimaAtlas:
    """Random-restart campaign followed by :func:`atlas_from_results`."""
    if sigma_d <= 0:
        raise InvalidParam("sigma_d must be positive")
    seed = opts.seed if seed is None else seed
    results = random_restart_campaign(vg, opts, n_restarts, seed)
    meta = {"seed": seed, "n_restarts": n_restarts, "p": opts.p}
    return atlas_from_results(results, merge_tol, sigma_d, kernel_squared, meta)


# --- sweeps ---------------------------------------------------------------


@dataclass
class SweepRow:
    lambda2: float
    sigma_n_deg: float
    pct_max: float
    n_minima: int
    label: str = ""
    seed: int = 0
    error: str = ""


def sweep(cells, opts: SolveOptions = SolveOptions(), n_restarts: int = 200,
          merge_tol: float = DEFAULT_MERGE_TOL, sigma_d: float = DEFAULT_SIGMA_D, on_cell=None) -> list[SweepRow]:
    """One atlas per cell.

    ``cells`` yields ``(label, seed, sigma_n_deg, vg)`` tuples.  A failing
    cell is recorded with NaN statistics and the sweep continues.
    ``on_cell(row, atlas)`` is called after every successful cell.
    """
    rows = []
    for label, seed, sigma_deg, vg in cells:
        lam2 = algebraic_connectivity(vg)
        try:
            atlas = build_atlas(vg, opts, n_restarts, merge_tol, sigma_d, seed=seed)
        except RotlandError as exc:
            rows.append(SweepRow(lam2, sigma_deg, float("nan"), 0, label, seed, type(exc).__name__))
            continue
        row = SweepRow(lam2, sigma_deg, atlas.pct_max, atlas.n_minima, label, seed)
        rows.append(row)
        if on_cell is not None:
            on_cell(row, atlas)
    return rows


def write_sweep_csv(rows: list[SweepRow], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["lambda2", "sigma_n_deg", "pct_max", "n_minima"])
        for r in rows:
            w.writerow([repr(r.lambda2), repr(r.sigma_n_deg), repr(r.pct_max), r.n_minima])


# --- output ---------------------------------------------------------------


def write_atlas(atlas: MinimaAtlas, out_dir) -> None:
    """``atlas.json``, ``atlas.csv`` and ``atlas.svg`` under ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "atlas.json").write_text(json.dumps(atlas.to_dict(), indent=1))
    with open(out / "atlas.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["id", "cost", "multiplicity", "x", "y"])
        for k, m in enumerate(atlas.minima):
            w.writerow([k, repr(m.cost), m.multiplicity, repr(float(atlas.embedding[k, 0])),
                        repr(float(atlas.embedding[k, 1]))])
    (out / "atlas.svg").write_text(atlas_svg(atlas))


_PALETTE = ["#313695", "#4575b4", "#74add1", "#abd9e9", "#fee090", "#fdae61", "#f46d43", "#d73027"]


def atlas_svg(atlas: MinimaAtlas, size: int = 480, seed: int = 0) -> str:
    """Scatter of the embedding: colour bucket and radius grow with cost; grey
    jittered crosses, one per run, show multiplicity."""
    rng = np.random.default_rng(seed)
    pad = 40
    xy = atlas.embedding
    lo, hi = xy.min(axis=0), xy.max(axis=0)
    span = float(max(hi[0] - lo[0], hi[1] - lo[1], 1e-12))

    def px(p):
        c = (p - lo) / span
        return pad + c[0] * (size - 2 * pad), size - pad - c[1] * (size - 2 * pad)

    costs = np.array([m.cost for m in atlas.minima])
    cmin, cmax = costs.min(), costs.max()
    rel = (costs - cmin) / (cmax - cmin) if cmax > cmin else np.zeros_like(costs)
    parts = ['<svg xmlns="http://www.w3.org/2000/svg" width="%d" height="%d" viewBox="0 0 %d %d">' % (size, size, size, size),
             '<rect width="100%" height="100%" fill="white"/>']
    for k, m in enumerate(atlas.minima):
        x, y = px(xy[k])
        for _ in range(m.multiplicity):
            jx, jy = x + rng.normal(0, 4), y + rng.normal(0, 4)
            parts.append('<path d="M%.1f %.1fh6M%.1f %.1fv6" stroke="#bbbbbb" stroke-width="1"/>'
                         % (jx - 3, jy, jx, jy - 3))
    for k in np.argsort(-costs):
        x, y = px(xy[k])
        color = _PALETTE[min(int(rel[k] * len(_PALETTE)), len(_PALETTE) - 1)]
        parts.append('<circle cx="%.1f" cy="%.1f" r="%.1f" fill="%s" fill-opacity="0.85" stroke="black" stroke-width="0.5">'
                     '<title>cost %.6g, multiplicity %d</title></circle>'
                     % (x, y, 4 + 10 * rel[k], color, atlas.minima[k].cost, atlas.minima[k].multiplicity))
    parts.append('<text x="10" y="20" font-family="sans-serif" font-size="14">%%max = %.1f  (%d minima)</text>'
                 % (atlas.pct_max, atlas.n_minima))
    parts.append("</svg>")
    return "\n".join(parts)
