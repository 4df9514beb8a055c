"""Problem instances: view graphs, generators, noise synthesis and JSON I/O."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from . import so3
from .errors import DisconnectedGraph, InvalidParam
from .numerics import sym_eig

MAX_TRIES = 1000


def _canonical_edges(edges) -> np.ndarray:
    e = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    return np.sort(e, axis=1)


def is_connected(n: int, edges) -> bool:
    """Whether the undirected graph on ``n`` vertices with ``edges`` is connected."""
    if n <= 1:
        return True
    e = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    if len(e) == 0:
        return False
    adj = coo_matrix((np.ones(len(e)), (e[:, 0], e[:, 1])), shape=(n, n))
    ncomp, _ = connected_components(adj, directed=False)
    return ncomp == 1


@dataclass(frozen=True, eq=False)
class ViewGraph:
    """A rotation averaging instance: undirected graph plus one measurement per edge.

    Edges are stored with ``i < j``; the measurement ``R[e]`` is an estimate
    of ``R_i @ R_j.T``.  Use :meth:`query` to get the measurement in either
    direction.
    """

    n: int
    edges: np.ndarray
    R: np.ndarray
    meta: dict = field(default_factory=dict)

    def __init__(self, n, edges, R, meta=None, *, check_connected=True):
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        R = np.asarray(R, dtype=float).reshape(-1, 3, 3)
        if len(edges) != len(R):
            raise InvalidParam("got %d edges but %d measurements" % (len(edges), len(R)))
        if np.any(edges < 0) or np.any(edges >= n):
            raise InvalidParam("edge endpoint out of range [0, %d)" % n)
        if np.any(edges[:, 0] == edges[:, 1]):
            raise InvalidParam("self-loops are not allowed")
        # canonical i < j; flip the measurement with the edge
        flip = edges[:, 0] > edges[:, 1]
        edges = np.where(flip[:, None], edges[:, ::-1], edges)
        R = np.where(flip[:, None, None], np.swapaxes(R, -1, -2), R)
        if len({(int(a), int(b)) for a, b in edges}) != len(edges):
            raise InvalidParam("duplicate edges")
        if check_connected and not is_connected(n, edges):
            raise DisconnectedGraph("view graph must be connected")
        edges.setflags(write=False)
        R.setflags(write=False)
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "R", R)
        object.__setattr__(self, "meta", dict(meta or {}))

    @property
    def m(self) -> int:
        return len(self.edges)

    def query(self, i: int, j: int) -> np.ndarray:
        """Measurement of ``R_i R_j^T``; the transpose of the stored one when ``i > j``."""
        a, b = (i, j) if i < j else (j, i)
        hit = np.flatnonzero((self.edges[:, 0] == a) & (self.edges[:, 1] == b))
        if len(hit) == 0:
            raise KeyError((i, j))
        r = self.R[hit[0]]
        return r.copy() if i < j else r.T.copy()

    def degrees(self) -> np.ndarray:
        return np.bincount(self.edges.ravel(), minlength=self.n)


# --- generators -----------------------------------------------------------


def _ws_once(n: int, k: int, p: float, rng: np.random.Generator) -> list[tuple[int, int]]:
    adj = [set() for _ in range(n)]
    for u in range(n):
        for j in range(1, k // 2 + 1):
            v = (u + j) % n
            adj[u].add(v)
            adj[v].add(u)
    if p > 0:
        # one pass over lattice offsets, rewiring the far endpoint of (u, u + j)
        for j in range(1, k // 2 + 1):
            for u in range(n):
                v = (u + j) % n
                if rng.random() < p:
                    if len(adj[u]) >= n - 1:
                        continue
                    w = int(rng.integers(n))
                    while w == u or w in adj[u]:
                        w = int(rng.integers(n))
                    adj[u].discard(v)
                    adj[v].discard(u)
                    adj[u].add(w)
                    adj[w].add(u)
    return sorted((u, v) for u in range(n) for v in adj[u] if u < v)


def gen_watts_strogatz(n: int, k: int, p: float, rng: np.random.Generator,
                       max_tries: int = MAX_TRIES) -> np.ndarray:
    """Connected Watts-Strogatz small-world graph as an ``(m, 2)`` edge array.

    Ring lattice with each vertex joined to its ``k`` nearest neighbours,
    then each lattice edge ``(u, u+j)`` has its far endpoint rewired with
    probability ``p`` to a uniform vertex that is neither ``u`` nor already
    adjacent.  Disconnected draws are regenerated.
    """
    if k % 2 or k < 2:
        raise InvalidParam("k must be a positive even integer, got %r" % k)
    if k >= n:
        raise InvalidParam("k must be smaller than n (k=%d, n=%d)" % (k, n))
    if not 0.0 <= p <= 1.0:
        raise InvalidParam("rewiring probability must lie in [0, 1], got %r" % p)
    for _ in range(max_tries):
        edges = _ws_once(n, k, p, rng)
        if is_connected(n, edges):
            return np.array(edges, dtype=np.int64)
    raise DisconnectedGraph("no connected Watts-Strogatz graph after %d tries" % max_tries)


def gen_gnm(n: int, m: int, rng: np.random.Generator, max_tries: int = MAX_TRIES) -> np.ndarray:
    """Uniform random connected simple graph with ``n`` vertices and ``m`` edges."""
    total = n * (n - 1) // 2
    if n < 1 or m < n - 1 or m > total:
        raise InvalidParam("need n - 1 <= m <= n(n-1)/2 (n=%d, m=%d)" % (n, m))
    iu, ju = np.triu_indices(n, k=1)
    for _ in range(max_tries):
        pick = np.sort(rng.choice(total, size=m, replace=False))
        edges = np.stack([iu[pick], ju[pick]], axis=1).astype(np.int64)
        if is_connected(n, edges):
            return edges
    raise DisconnectedGraph("no connected G(n, m) graph after %d tries" % max_tries)


def cycle_graph(n: int) -> np.ndarray:
    return _canonical_edges([(i, (i + 1) % n) for i in range(n)])


def complete_graph(n: int) -> np.ndarray:
    iu, ju = np.triu_indices(n, k=1)
    return np.stack([iu, ju], axis=1).astype(np.int64)


def random_tree(n: int, rng: np.random.Generator) -> np.ndarray:
    """Random recursive tree: vertex ``v`` attaches to a uniform earlier vertex."""
    parents = [int(rng.integers(v)) for v in range(1, n)]
    return _canonical_edges([(p, v) for v, p in zip(range(1, n), parents)])


# --- noise ----------------------------------------------------------------


@dataclass(frozen=True)
class NoiseSpec:
    sigma_n: float = 0.0  # radians
    outlier_fraction: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.outlier_fraction <= 1.0:
            raise InvalidParam("outlier_fraction must lie in [0, 1]")
        if self.sigma_n < 0:
            raise InvalidParam("sigma_n must be nonnegative")


def synthesize(n: int, edges, noise: NoiseSpec, rng: np.random.Generator | None = None,
               meta: dict | None = None):
    """Draw a ground truth and noisy measurements on a fixed topology.

    Ground truth rotations are Haar-uniform.  Each inlier measurement is
    ``R_i R_j^T exp([eps]_x)`` with ``eps ~ N(0, sigma_n^2 I_3)``; with
    probability ``outlier_fraction`` an edge gets a uniform random rotation
    instead.  All random streams are drawn in full regardless of the noise
    parameters, so two calls that differ only in ``sigma_n`` or
    ``outlier_fraction`` share the ground truth and noise directions.

    Returns:
        ``(ViewGraph, truth)`` where ``truth`` has shape ``(n, 3, 3)``.
    """
    if rng is None:
        rng = np.random.default_rng(noise.seed)
    edges = _canonical_edges(edges)
    m = len(edges)
    truth = so3.random_uniform(rng, n)
    z = rng.standard_normal((m, 3))
    u = rng.random(m)
    outliers = so3.random_uniform(rng, m)

    i, j = edges[:, 0], edges[:, 1]
    rel = truth[i] @ np.swapaxes(truth[j], -1, -2)
    meas = rel @ so3.exp_map(noise.sigma_n * z)
    is_out = u < noise.outlier_fraction
    meas[is_out] = outliers[is_out]
    info = {"sigma_n": noise.sigma_n, "outlier_fraction": noise.outlier_fraction,
            "noise_seed": noise.seed, "n_outliers": int(is_out.sum())}
    info.update(meta or {})
    return ViewGraph(n, edges, meas, info), truth


# --- spectra --------------------------------------------------------------


def laplacian(graph, weights=None, n: int | None = None) -> np.ndarray:
    """Graph Laplacian ``D - A``; ``graph`` is a ViewGraph or an edge array (with ``n``)."""
    if isinstance(graph, ViewGraph):
        n, edges = graph.n, graph.edges
    else:
        edges = np.asarray(graph, dtype=np.int64).reshape(-1, 2)
        if n is None:
            n = int(edges.max()) + 1 if len(edges) else 0
    w = np.ones(len(edges)) if weights is None else np.asarray(weights, dtype=float)
    L = np.zeros((n, n))
    i, j = edges[:, 0], edges[:, 1]
    np.add.at(L, (i, j), -w)
    np.add.at(L, (j, i), -w)
    np.add.at(L, (i, i), w)
    np.add.at(L, (j, j), w)
    return L


def algebraic_connectivity(graph, weights=None, n: int | None = None) -> float:
    """Second-smallest Laplacian eigenvalue (lambda_2)."""
    L = laplacian(graph, weights, n)
    if L.shape[0] < 2:
        return 0.0
    return float(sym_eig(L).values[1])


# --- I/O ------------------------------------------------------------------


def _rot_rows(R) -> list:
    return [[float(x) for x in r.ravel()] for r in np.asarray(R).reshape(-1, 3, 3)]


def problem_to_dict(vg: ViewGraph) -> dict:
    return {
        "n": vg.n,
        "edges": [{"i": int(i), "j": int(j), "R": row}
                  for (i, j), row in zip(vg.edges, _rot_rows(vg.R))],
        "meta": vg.meta,
    }


def problem_from_dict(d: dict) -> ViewGraph:
    try:
        n = int(d["n"])
        edges = [(int(e["i"]), int(e["j"])) for e in d["edges"]]
        R = np.array([e["R"] for e in d["edges"]], dtype=float).reshape(-1, 3, 3)
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidParam("malformed problem: %s" % exc) from exc
    return ViewGraph(n, edges, R, d.get("meta", {}))


def write_problem(vg: ViewGraph, path) -> None:
    Path(path).write_text(json.dumps(problem_to_dict(vg)))


def read_problem(path) -> ViewGraph:
    return problem_from_dict(json.loads(Path(path).read_text()))


def write_solution(rotations, path, meta: dict | None = None) -> None:
    d = {"rotations": _rot_rows(rotations)}
    if meta:
        d["meta"] = meta
    Path(path).write_text(json.dumps(d))


def read_solution(path) -> np.ndarray:
    d = json.loads(Path(path).read_text())
    try:
        return np.array(d["rotations"], dtype=float).reshape(-1, 3, 3)
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidParam("malformed solution: %s" % exc) from exc


def make_topology(graph: str, n: int, *, k: int | None = None, p_rewire: float | None = None,
                  m: int | None = None, seed: int = 0) -> np.ndarray:
    """Edge array for a named family: ``ws``, ``gnm``, ``cycle``, ``complete`` or ``tree``."""
    rng = np.random.default_rng([int(seed), 0])
    if graph == "ws":
        if k is None or p_rewire is None:
            raise InvalidParam("ws needs k and p_rewire")
        return gen_watts_strogatz(n, k, p_rewire, rng)
    if graph == "gnm":
        if m is None:
            raise InvalidParam("gnm needs m")
        return gen_gnm(n, m, rng)
    if graph == "cycle":
        return cycle_graph(n)
    if graph == "complete":
        return complete_graph(n)
    if graph == "tree":
        return random_tree(n, rng)
    raise InvalidParam("unknown graph family %r" % graph)


def make_instance(graph: str, n: int, *, k=None, p_rewire=None, m=None, sigma_n: float = 0.0,
                  outlier_fraction: float = 0.0, seed: int = 0):
    """Topology plus synthesized measurements, both derived from one seed.

    The topology and the ground truth do not depend on ``sigma_n`` or
    ``outlier_fraction``, so a fixed seed gives one graph and one ground
    truth across a noise sweep.
    """
    edges = make_topology(graph, n, k=k, p_rewire=p_rewire, m=m, seed=seed)
    noise = NoiseSpec(sigma_n, outlier_fraction, seed)
    meta = {"graph": graph, "n": n, "k": k, "p_rewire": p_rewire, "m": m, "seed": seed}
    return synthesize(n, edges, noise, np.random.default_rng([int(seed), 1]), meta)
