"""Gauge (global right-rotation) symmetry: projectors, alignment, quotient distance."""

from __future__ import annotations

import warnings
from typing import NamedTuple

import numpy as np

from . import so3
from .errors import AlignmentAmbiguous, InvalidParam
from .numerics import orthonormal_complement

KARCHER_TOL = 1e-12
KARCHER_MAX_ITERS = 100
KARCHER_RESID_TOL = 1e-9


class GaugeBasis(NamedTuple):
    vertical: np.ndarray  # (3, 3n) orthonormal rows, vertex-major 1_n (x) e_k / sqrt(n)
    horizontal_projector: np.ndarray  # (3n, 3n)

    @property
    def n(self) -> int:
        return self.vertical.shape[1] // 3

    def horizontal_basis(self) -> np.ndarray:
        """Orthonormal ``(3n, 3n - 3)`` basis of the horizontal space."""
        return orthonormal_complement(self.vertical)


def vertical_basis(n: int) -> GaugeBasis:
    if n < 1:
        raise InvalidParam("n must be at least 1")
    V = np.kron(np.ones((1, n)), np.eye(3)) / np.sqrt(n)
    P = np.eye(3 * n) - V.T @ V
    return GaugeBasis(V, P)


def project_horizontal(g: np.ndarray, basis: GaugeBasis | None = None) -> np.ndarray:
    """Remove the gauge component: ``P g`` for vectors, ``P M P`` for matrices.

    Removing the gauge component of a vertex-major vector is the same as
    subtracting the per-axis mean over vertices, which is what is done here;
    ``basis`` only serves as a shape check.
    """
    g = np.asarray(g, dtype=float)
    d = g.shape[0]
    if d % 3:
        raise InvalidParam("length %d is not a multiple of 3" % d)
    if basis is not None and basis.vertical.shape[1] != d:
        raise InvalidParam("basis is for dimension %d, got %d" % (basis.vertical.shape[1], d))
    n = d // 3
    if g.ndim == 1:
        v = g.reshape(n, 3)
        return (v - v.mean(axis=0)).ravel()
    if g.ndim == 2 and g.shape == (d, d):
        m = g.reshape(n, 3, d)
        m = (m - m.mean(axis=0)).reshape(d, d)
        m = m.reshape(d, n, 3)
        return (m - m.mean(axis=1, keepdims=True)).reshape(d, d)
    raise InvalidParam("expected a 3n vector or a 3n x 3n matrix")


class Alignment(NamedTuple):
    rotation: np.ndarray  # S
    aligned: np.ndarray  # b @ S
    distance: float  # quotient distance
    converged: bool
    residual: float  # norm of the mean log at the final S


def _karcher(Q: np.ndarray):
    """Intrinsic mean of each row of rotations; ``Q`` has shape ``(P, n, 3, 3)``."""
    P = Q.shape[0]
    S = project_to_so3_safe(Q.sum(axis=1))
    active = np.arange(P)
    for _ in range(KARCHER_MAX_ITERS):
        if active.size == 0:
            break
        Sa = S[active]
        logs = so3.log_map(np.swapaxes(Sa, -1, -2)[:, None] @ Q[active], allow_near_pi=True)
        step = logs.mean(axis=1)
        size = np.linalg.norm(step, axis=-1)
        S[active] = Sa @ so3.exp_map(step)
        active = active[size >= KARCHER_TOL]
    # a spread with near-antipodal members may never contract; judge by the
    # first-order residual at the returned S
    logs = so3.log_map(np.swapaxes(S, -1, -2)[:, None] @ Q, allow_near_pi=True)
    resid = np.linalg.norm(logs.mean(axis=1), axis=-1)
    converged = resid < KARCHER_RESID_TOL
    dist = np.sqrt(np.sum(so3.angle(np.swapaxes(S, -1, -2)[:, None] @ Q) ** 2, axis=1))
    return S, dist, converged, resid


def project_to_so3_safe(m: np.ndarray) -> np.ndarray:
    # chordal init; a (measure-zero) singular sum falls back to the identity
    m = np.asarray(m, dtype=float)
    u, s, vt = np.linalg.svd(m)
    d = np.sign(np.linalg.det(u @ vt))
    u[..., :, -1] *= d[..., None]
    out = u @ vt
    bad = s[..., -1] <= 1e-12 * np.maximum(s[..., 0], 1.0)
    out[bad] = np.eye(3)
    return out


def align(a: np.ndarray, b: np.ndarray, *, warn: bool = True) -> Alignment:
    """Gauge rotation ``S`` minimizing ``sum_i d(a_i, b_i S)^2``.

    ``S`` is the intrinsic mean of ``Q_i = b_i^T a_i``, found by chordal
    initialization followed by Karcher iterations.  Non-contraction is
    reported via :class:`AlignmentAmbiguous` (a warning) and the
    ``converged`` flag, never raised.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.shape[-2:] != (3, 3):
        raise InvalidParam("solutions must have equal shape (n, 3, 3)")
    Q = np.swapaxes(b, -1, -2) @ a
    S, dist, conv, resid = _karcher(Q[None])
    if warn and not conv[0]:
        warnings.warn("Karcher alignment did not contract (residual %.2e)" % resid[0], AlignmentAmbiguous)
    return Alignment(S[0], b @ S[0], float(dist[0]), bool(conv[0]), float(resid[0]))


def quotient_distance(a: np.ndarray, b: np.ndarray) -> float:
    """``min_S sqrt(sum_i d(a_i, b_i S)^2)``, the root-sum-square metric modulo gauge."""
    return align(a, b).distance


def pairwise_quotient_distances(sols, chunk: int = 2048):
    """All pairwise quotient distances among a list of solutions.

    Returns:
        ``(D, ok)``: a symmetric distance matrix and a boolean matrix that is
        false for pairs whose alignment did not converge.
    """
    sols = np.asarray(sols, dtype=float)
    N = len(sols)
    D = np.zeros((N, N))
    ok = np.ones((N, N), dtype=bool)
    iu, ju = np.triu_indices(N, k=1)
    for start in range(0, len(iu), chunk):
        ii, jj = iu[start:start + chunk], ju[start:start + chunk]
        Q = np.swapaxes(sols[jj], -1, -2) @ sols[ii]
        _, dist, conv, _ = _karcher(Q)
        D[ii, jj] = D[jj, ii] = dist
        ok[ii, jj] = ok[jj, ii] = conv
    return D, ok
