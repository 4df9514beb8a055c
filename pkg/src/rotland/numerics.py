"""Dense linear algebra helpers: checked symmetric eigensolver, polar projection onto SO(3)."""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import Degenerate, EigenFailure

EIG_RTOL = 1e-8


class SymEig(NamedTuple):
    values: np.ndarray  # ascending
    vectors: np.ndarray  # columns, orthonormal


def sym_eig(m: np.ndarray, rtol: float = EIG_RTOL) -> SymEig:
    """Eigendecomposition of a symmetric matrix with a residual check.

    The input is symmetrized first.  Raises :class:`EigenFailure` when
    ``max_k ||M v_k - lambda_k v_k|| > rtol * ||M||``.
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("expected a square matrix, got shape %s" % (m.shape,))
    m = 0.5 * (m + m.T)
    if m.shape[0] == 0:
        return SymEig(np.zeros(0), np.zeros((0, 0)))
    w, v = np.linalg.eigh(m)
    scale = max(np.linalg.norm(m, 2), np.finfo(float).tiny)
    resid = np.linalg.norm(m @ v - v * w, axis=0).max()
    if resid > rtol * scale:
        raise EigenFailure("eigen residual %.3e exceeds %.1e * ||M||" % (resid, rtol))
    return SymEig(w, v)


def project_to_so3(m: np.ndarray, min_singular: float = 1e-12) -> np.ndarray:
    """Nearest rotation(s) in Frobenius norm (polar factor with det correction)."""
    m = np.asarray(m, dtype=float)
    u, s, vt = np.linalg.svd(m)
    if np.any(s[..., -1] <= min_singular * np.maximum(s[..., 0], 1.0)):
        raise Degenerate("matrix is numerically singular; polar factor not unique")
    d = np.sign(np.linalg.det(u @ vt))
    u = u.copy()
    u[..., :, -1] *= d[..., None]
    return u @ vt


def orthonormal_complement(vectors: np.ndarray) -> np.ndarray:
    """Orthonormal basis (columns) of the complement of the span of ``vectors``.

    ``vectors`` has shape ``(k, d)`` with orthonormal rows whose span meets
    the last ``k`` standard basis directions transversally.  The result is the
    QR orthonormalization of the projected first ``d - k`` standard basis
    vectors, so it is fully deterministic.
    """
    vectors = np.atleast_2d(np.asarray(vectors, dtype=float))
    k, d = vectors.shape
    proj = np.eye(d) - vectors.T @ vectors
    q, r = np.linalg.qr(proj[:, : d - k])
    # Fix column signs so the basis does not depend on LAPACK conventions.
    signs = np.where(np.diag(r) < 0, -1.0, 1.0)
    return q * signs
