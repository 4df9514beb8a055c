"""The geodesic l_p cost, its gradient and its exact Hessian on SO(3)^n.

Tangent coordinates are vertex-major (entries ``3i:3i+3`` belong to vertex
``i``) and a perturbation ``x`` acts on the right, ``R_i -> R_i exp([x_i]_x)``.
Each edge residual is ``E_ij = R_i^T Rt_ij R_j`` with angle ``theta`` and
unit axis ``w``.

Per edge, with ``a = (p/2) theta^(p-1)``, the Hessian has diagonal blocks

    S = p(p-1) theta^(p-2) w w^T + a * cot(theta/2) * (I - w w^T)

at ``(i, i)`` and ``(j, j)``, and ``-S + A^T`` at ``(i, j)``, ``-S + A`` at
``(j, i)`` with ``A = a [w]_x``.  The ``cot(theta/2)`` factor is the
curvature of the geodesic distance in directions orthogonal to the axis;
without it the blocks do not match finite differences.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import so3
from .errors import InvalidParam, NearZeroResidual

THETA_MIN = 1e-8


@dataclass(frozen=True)
class Residuals:
    """Per-edge residual angles (radians) and unit axes (zero where theta is 0)."""

    edges: np.ndarray
    theta: np.ndarray
    axis: np.ndarray

    @property
    def rotvec(self) -> np.ndarray:
        return self.theta[:, None] * self.axis


def residual_rotations(vg, sol: np.ndarray) -> np.ndarray:
    sol = np.asarray(sol, dtype=float)
    if sol.shape != (vg.n, 3, 3):
        raise InvalidParam("solution has shape %s, expected (%d, 3, 3)" % (sol.shape, vg.n))
    i, j = vg.edges[:, 0], vg.edges[:, 1]
    return np.swapaxes(sol[i], -1, -2) @ vg.R @ sol[j]


def residuals(vg, sol: np.ndarray) -> Residuals:
    """Angle and axis of ``R_i^T Rt_ij R_j`` for every edge."""
    E = residual_rotations(vg, sol)
    v = so3.log_map(E, allow_near_pi=True)
    theta = so3.angle(E)
    norm = np.linalg.norm(v, axis=-1)
    axis = np.zeros_like(v)
    nz = norm > 0
    axis[nz] = v[nz] / norm[nz, None]
    return Residuals(vg.edges, theta, axis)


def _check_p(p: float, strict: bool = False) -> None:
    if p < 1 or (strict and p <= 1):
        raise InvalidParam("exponent p must be %s 1, got %r" % (">" if strict else ">=", p))


def cost(vg, sol: np.ndarray, p: float = 2.0) -> float:
    """Sum over edges of ``theta_ij ** p``."""
    _check_p(p)
    theta = so3.angle(residual_rotations(vg, sol))
    return float(np.sum(theta ** p))


def _guard_small(theta: np.ndarray, p: float) -> None:
    if p < 2 and np.any(theta < THETA_MIN):
        bad = int(np.argmin(theta))
        raise NearZeroResidual(
            "edge %d has residual %.3e < %.0e; l_%g derivatives undefined" % (bad, theta[bad], THETA_MIN, p)
        )


def gradient(vg, sol: np.ndarray, p: float = 2.0, res: Residuals | None = None) -> np.ndarray:
    """Riemannian gradient as a vertex-major ``3n`` vector."""
    _check_p(p, strict=True)
    res = residuals(vg, sol) if res is None else res
    _guard_small(res.theta, p)
    g_edge = (p * res.theta ** (p - 1))[:, None] * res.axis
    g = np.zeros((vg.n, 3))
    np.add.at(g, res.edges[:, 1], g_edge)
    np.add.at(g, res.edges[:, 0], -g_edge)
    return g.ravel()


def _theta_cot_half(theta: np.ndarray) -> np.ndarray:
    # theta * cot(theta / 2), smooth through 0 where it tends to 2
    small = theta < 1e-4
    th = np.where(small, 1.0, theta)
    return np.where(small, 2.0 - theta * theta / 6.0, th / np.tan(0.5 * th))


def edge_blocks(theta: np.ndarray, axis: np.ndarray, p: float):
    """Exact per-edge Hessian blocks ``(S, A)``, each of shape ``(m, 3, 3)``.

    Zero-angle edges take the continuous limit for ``p >= 2`` (``2 I`` for
    ``p = 2``, zero for ``p > 2``).  For ``p < 2`` they raise
    :class:`NearZeroResidual`.
    """
    theta = np.asarray(theta, dtype=float)
    axis = np.asarray(axis, dtype=float)
    _guard_small(theta, p)
    ww = axis[:, :, None] * axis[:, None, :]
    eye = np.eye(3)
    tc = _theta_cot_half(theta)
    if p == 2:
        radial = np.full_like(theta, 2.0)
        tang = tc
    else:
        th = np.where(theta > 0, theta, 1.0)
        radial = np.where(theta > 0, p * (p - 1) * th ** (p - 2), 0.0)
        tang = np.where(theta > 0, 0.5 * p * th ** (p - 2) * tc, 0.0)
    # at theta == 0 the axis is the zero vector, so S = tang * I, which is the
    # exact limit 2 I for p == 2
    S = radial[:, None, None] * ww + tang[:, None, None] * (eye - ww)
    a = 0.5 * p * theta ** (p - 1)
    A = a[:, None, None] * so3.hat(axis)
    return S, A


def hessian(vg, sol: np.ndarray, p: float = 2.0, res: Residuals | None = None) -> np.ndarray:
    """Dense ``3n x 3n`` Hessian assembled from the per-edge blocks."""
    _check_p(p, strict=True)
    res = residuals(vg, sol) if res is None else res
    S, A = edge_blocks(res.theta, res.axis, p)
    n = vg.n
    H = np.zeros((n, n, 3, 3))
    i, j = res.edges[:, 0], res.edges[:, 1]
    np.add.at(H, (i, i), S)
    np.add.at(H, (j, j), S)
    # off-diagonal blocks are unique per edge in a simple graph
    H[i, j] = -S + np.swapaxes(A, -1, -2)
    H[j, i] = -S + A
    return H.transpose(0, 2, 1, 3).reshape(3 * n, 3 * n)


def retract(sol: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Move along tangent vector ``x``: ``R_i -> R_i exp([x_i]_x)``."""
    sol = np.asarray(sol, dtype=float)
    return sol @ so3.exp_map(np.asarray(x, dtype=float).reshape(-1, 3))
