"""Local convexity certificates at a given solution.

Three tests are reported side by side:

* the exact test: smallest eigenvalue of the Hessian restricted to the
  horizontal (gauge-free) space;
* the normalized-Laplacian bound built from per-edge isotropic weights
  ``alpha_ij`` and residual degrees ``D_ii``;
* the separated bound ``lambda_2(L) > max_i D_ii / min alpha``.

Each bound is sufficient for the one before it, so on any instance
``separated_pass => lnorm_pass => exact_min_eig > 0``.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .cost import THETA_MIN, edge_blocks, hessian, residuals
from .errors import AlphaNonpositive, DegenerateDegree, InvalidParam, NearZeroResidual, RotlandError
from .gauge import vertical_basis
from .graphmodel import laplacian
from .numerics import orthonormal_complement, sym_eig

DEGREE_MIN = 1e-15


def _check(p: float) -> None:
    if p <= 1:
        raise InvalidParam("certification needs p > 1, got %r" % p)


def exact_projected_test(vg, sol, p: float = 2.0) -> float:
    """Minimum of ``x^T H x`` over unit horizontal ``x``.

    Computed as the smallest eigenvalue of ``B^T H B`` for an orthonormal
    horizontal basis ``B``.  Positive means locally convex.
    """
    _check(p)
    H = hessian(vg, sol, p)
    B = vertical_basis(vg.n).horizontal_basis()
    if B.shape[1] == 0:
        return float("inf")
    return float(sym_eig(B.T @ H @ B).values[0])


def projected_min_eig_via_projector(vg, sol, p: float = 2.0) -> float:
    """Second route to the exact test: eigenvalues of ``P H P`` minus the three gauge zeros."""
    _check(p)
    H = hessian(vg, sol, p)
    P = vertical_basis(vg.n).horizontal_projector
    w, v = sym_eig(P @ H @ P)
    V = vertical_basis(vg.n).vertical
    # drop the three eigenvectors that lie in the vertical space
    vert_weight = np.sum((V @ v) ** 2, axis=0)
    keep = np.argsort(vert_weight)[: len(w) - 3]
    return float(np.min(w[keep])) if len(keep) else float("inf")


def edge_alpha(theta: np.ndarray, p: float, axis: np.ndarray | None = None) -> np.ndarray:
    """Isotropic lower bound ``alpha_ij`` on each diagonal Hessian block.

    The closed form is ``min((p/2) t^(p-1), p(p-1) t^(p-2) - (p/2) t^(p-1))``.
    It is capped at the block's true smallest eigenvalue, which only bites
    for residuals beyond pi/2 (where the ``cot(t/2)`` curvature factor drops
    below one) and keeps every derived bound sound.
    """
    theta = np.asarray(theta, dtype=float)
    if p < 2 and np.any(theta < THETA_MIN):
        raise NearZeroResidual("alpha undefined for residuals below %.0e when p < 2" % THETA_MIN)
    a = 0.5 * p * theta ** (p - 1)
    with np.errstate(divide="ignore"):
        b = p * (p - 1) * np.where(theta > 0, theta, 1.0) ** (p - 2)
    b = np.where(theta > 0, b, 2.0 if p == 2 else 0.0)
    closed = np.minimum(a, b - a)
    if axis is None:
        axis = np.tile([1.0, 0.0, 0.0], (len(theta), 1)) * (theta > 0)[:, None]
    S, _ = edge_blocks(theta, axis, p)
    exact_min = np.linalg.eigvalsh(S)[:, 0] if len(theta) else np.zeros(0)
    return np.minimum(closed, exact_min)


def edge_curvature_weight(theta: np.ndarray, p: float) -> np.ndarray:
    """``(p/2) theta^(p-1)``: the norm of the skew block and each edge's degree contribution."""
    return 0.5 * p * np.asarray(theta, dtype=float) ** (p - 1)


def residual_degree(vg, theta: np.ndarray, p: float) -> np.ndarray:
    w = edge_curvature_weight(theta, p)
    D = np.zeros(vg.n)
    np.add.at(D, vg.edges[:, 0], w)
    np.add.at(D, vg.edges[:, 1], w)
    return D


def _ones_complement(n: int) -> np.ndarray:
    return orthonormal_complement(np.ones((1, n)) / np.sqrt(n))


def lnorm_bound(vg, sol, p: float = 2.0):
    """Normalized weighted-Laplacian bound.

    With ``L = L(alpha)`` and residual degrees ``D``, convexity follows when
    ``y^T L y > y^T D y`` for every ``y`` orthogonal to the all-ones (gauge)
    vector.  Written with ``L_norm = D^-1/2 L D^-1/2`` this is
    ``min x^T L_norm x > 1`` over unit ``x`` orthogonal to ``D^-1/2 1``
    (the image of the gauge complement under ``x = D^1/2 y``).

    Returns:
        ``(lnorm_min, passed, literal_min)`` where ``literal_min`` is the
        same minimum taken over ``x`` orthogonal to the all-ones vector
        instead; the two agree when all residual degrees are equal.
    """
    _check(p)
    res = residuals(vg, sol)
    alpha = edge_alpha(res.theta, p, res.axis)
    D = residual_degree(vg, res.theta, p)
    if np.any(D < DEGREE_MIN):
        raise DegenerateDegree("vertex %d has zero residual degree" % int(np.argmin(D)))
    L = laplacian(vg, alpha)
    dih = 1.0 / np.sqrt(D)
    Lnorm = dih[:, None] * L * dih[None, :]
    n = vg.n
    if n < 2:
        return float("inf"), True, float("inf")
    # horizontal directions in normalized coordinates: x orthogonal to D^-1/2 1
    u = dih / np.linalg.norm(dih)
    Q = _complement_of(u)
    sound = float(sym_eig(Q.T @ Lnorm @ Q).values[0])
    Q1 = _ones_complement(n)
    literal = float(sym_eig(Q1.T @ Lnorm @ Q1).values[0])
    return sound, sound > 1.0, literal


def _complement_of(u: np.ndarray) -> np.ndarray:
    # orthonormal basis of u^perp via a Householder reflector
    n = len(u)
    e = np.zeros(n)
    e[0] = 1.0
    s = 1.0 if u[0] >= 0 else -1.0
    h = u + s * e
    h /= np.linalg.norm(h)
    Hm = np.eye(n) - 2.0 * np.outer(h, h)
    return Hm[:, 1:]


def separated_bound(vg, sol, p: float = 2.0):
    """``lambda_2`` of the unweighted Laplacian against ``max_i D_ii / min alpha``.

    Returns ``(lhs, rhs, passed)``.  Raises :class:`AlphaNonpositive` when
    the smallest edge weight is not positive.
    """
    _check(p)
    res = residuals(vg, sol)
    alpha = edge_alpha(res.theta, p, res.axis)
    lhs = _lambda2(laplacian(vg))
    amin = float(alpha.min())
    if amin <= 0:
        raise AlphaNonpositive("min alpha = %.3e <= 0; separated bound inapplicable" % amin)
    D = residual_degree(vg, res.theta, p)
    rhs = float(D.max() / amin)
    return lhs, rhs, lhs > rhs


def _lambda2(L: np.ndarray) -> float:
    return float(sym_eig(L).values[1]) if L.shape[0] > 1 else 0.0


@dataclass
class ConvexityReport:
    p: float
    exact_min_eig: float | None = None
    lnorm_min: float | None = None
    lnorm_pass: bool = False
    lnorm_min_literal: float | None = None
    separated_lhs: float | None = None
    separated_rhs: float | None = None
    separated_pass: bool = False
    weighted_lambda2: float | None = None
    weighted_pass: bool = False
    alpha_min: float | None = None
    max_weighted_degree: float | None = None
    errors: dict = field(default_factory=dict)
    edges: list = field(default_factory=list)

    @property
    def exact_pass(self) -> bool:
        return self.exact_min_eig is not None and self.exact_min_eig > 0

    def chain_consistent(self) -> bool:
        """``separated_pass => lnorm_pass => exact_pass``."""
        return (not self.separated_pass or self.lnorm_pass) and (not self.lnorm_pass or self.exact_pass)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["exact_pass"] = self.exact_pass
        return d

    def verdict_lines(self) -> list[str]:
        def fmt(x):
            return "n/a" if x is None else "%.6g" % x

        def tag(ok, key):
            return "ERROR(%s)" % self.errors[key] if key in self.errors else ("PASS" if ok else "FAIL")

        return [
            "exact     %s  min horizontal Hessian eigenvalue = %s"
            % (tag(self.exact_pass, "exact"), fmt(self.exact_min_eig)),
            "lnorm     %s  min normalized Laplacian quotient = %s (needs > 1)"
            % (tag(self.lnorm_pass, "lnorm"), fmt(self.lnorm_min)),
            "separated %s  lambda2 = %s vs residual term = %s"
            % (tag(self.separated_pass, "separated"), fmt(self.separated_lhs), fmt(self.separated_rhs)),
        ]


def certify(vg, sol, p: float = 2.0) -> ConvexityReport:
    """Run all three tests; per-test failures land in ``report.errors``."""
    _check(p)
    rep = ConvexityReport(p=p)
    res = residuals(vg, sol)
    try:
        alpha = edge_alpha(res.theta, p, res.axis)
        rep.alpha_min = float(alpha.min()) if len(alpha) else None
        rep.edges = [{"i": int(i), "j": int(j), "theta": float(t), "alpha": float(a)}
                     for (i, j), t, a in zip(vg.edges, res.theta, alpha)]
    except RotlandError as exc:
        rep.errors["alpha"] = type(exc).__name__
        rep.edges = [{"i": int(i), "j": int(j), "theta": float(t), "alpha": None}
                     for (i, j), t in zip(vg.edges, res.theta)]
    D = residual_degree(vg, res.theta, p)
    rep.max_weighted_degree = float(D.max())

    try:
        rep.exact_min_eig = exact_projected_test(vg, sol, p)
    except RotlandError as exc:
        rep.errors["exact"] = type(exc).__name__
    try:
        rep.lnorm_min, rep.lnorm_pass, rep.lnorm_min_literal = lnorm_bound(vg, sol, p)
    except RotlandError as exc:
        rep.errors["lnorm"] = type(exc).__name__
    try:
        rep.separated_lhs = _lambda2(laplacian(vg))
        rep.separated_lhs, rep.separated_rhs, rep.separated_pass = separated_bound(vg, sol, p)
    except RotlandError as exc:
        rep.errors["separated"] = type(exc).__name__
    if "alpha" not in rep.errors:
        try:
            rep.weighted_lambda2 = _lambda2(laplacian(vg, alpha))
            rep.weighted_pass = rep.weighted_lambda2 > rep.max_weighted_degree
        except RotlandError as exc:
            rep.errors["weighted"] = type(exc).__name__
    return rep


def write_report(rep: ConvexityReport, path, meta: dict | None = None) -> None:
    d = rep.to_dict()
    if meta:
        d["meta"] = meta
    Path(path).write_text(json.dumps(d, indent=2))
