"""SO(3) primitives.

Rotations are plain ``(3, 3)`` float arrays and tangent vectors are
angle-axis 3-vectors (radians).  Every function broadcasts over leading
dimensions, so a stack of rotations is an ``(..., 3, 3)`` array.
"""

from __future__ import annotations

import numpy as np

from .errors import AngleNearPi, InvalidParam

# Taylor branch threshold for exp/log at small angles.
SMALL_ANGLE = 1e-6
# log_map refuses angles at or beyond pi - NEAR_PI.
NEAR_PI = 1e-6
# Above this angle the axis is read from the symmetric part instead of the skew part.
_SYM_BRANCH = 3.0


def hat(v: np.ndarray) -> np.ndarray:
    """Skew-symmetric matrix ``[v]_x`` such that ``hat(v) @ u == cross(v, u)``."""
    v = np.asarray(v, dtype=float)
    out = np.zeros(v.shape[:-1] + (3, 3))
    out[..., 0, 1] = -v[..., 2]
    out[..., 0, 2] = v[..., 1]
    out[..., 1, 0] = v[..., 2]
    out[..., 1, 2] = -v[..., 0]
    out[..., 2, 0] = -v[..., 1]
    out[..., 2, 1] = v[..., 0]
    return out


def vee(m: np.ndarray) -> np.ndarray:
    """Inverse of :func:`hat`; reads the skew part of ``m``."""
    m = np.asarray(m, dtype=float)
    return 0.5 * np.stack(
        [m[..., 2, 1] - m[..., 1, 2], m[..., 0, 2] - m[..., 2, 0], m[..., 1, 0] - m[..., 0, 1]],
        axis=-1,
    )


def exp_map(t: np.ndarray) -> np.ndarray:
    """Rodrigues exponential: angle-axis vector(s) to rotation matrix(es)."""
    t = np.asarray(t, dtype=float)
    theta = np.linalg.norm(t, axis=-1)
    small = theta < SMALL_ANGLE
    th = np.where(small, 1.0, theta)
    t2 = theta * theta
    a = np.where(small, 1.0 - t2 / 6.0, np.sin(th) / th)
    b = np.where(small, 0.5 - t2 / 24.0, (1.0 - np.cos(th)) / (th * th))
    k = hat(t)
    k2 = k @ k
    return np.eye(3) + a[..., None, None] * k + b[..., None, None] * k2


def angle(r: np.ndarray) -> np.ndarray:
    """Rotation angle in [0, pi], computed as atan2(|skew|, (tr - 1)/2)."""
    r = np.asarray(r, dtype=float)
    s = np.linalg.norm(vee(r), axis=-1)
    c = 0.5 * (np.trace(r, axis1=-2, axis2=-1) - 1.0)
    return np.arctan2(s, c)


def _log(r: np.ndarray) -> np.ndarray:
    # Principal log valid everywhere; near pi the axis sign is fixed by the
    # (tiny) skew part, and at exactly pi it is an arbitrary valid choice.
    r = np.asarray(r, dtype=float)
    lead = r.shape[:-2]
    r = r.reshape(-1, 3, 3)
    theta = angle(r)
    skew = vee(r)
    small = theta < SMALL_ANGLE
    big = theta > _SYM_BRANCH
    mid = ~(small | big)

    out = np.zeros((r.shape[0], 3))
    out[small] = skew[small] * (1.0 + theta[small] ** 2 / 6.0)[..., None]
    if np.any(mid):
        th = theta[mid]
        out[mid] = skew[mid] * (th / np.sin(th))[..., None]
    if np.any(big):
        rb = r[big]
        th = theta[big]
        c = np.cos(th)
        sym = 0.5 * (rb + np.swapaxes(rb, -1, -2)) - c[..., None, None] * np.eye(3)
        wwt = sym / (1.0 - c)[..., None, None]
        diag = np.diagonal(wwt, axis1=-2, axis2=-1)
        col = np.argmax(diag, axis=-1)
        axis = np.take_along_axis(wwt, col[..., None, None], axis=-1)[..., 0]
        axis /= np.linalg.norm(axis, axis=-1, keepdims=True)
        sign = np.where(np.einsum("...i,...i->...", axis, skew[big]) < 0.0, -1.0, 1.0)
        out[big] = axis * (sign * th)[..., None]
    return out.reshape(lead + (3,))


def log_map(r: np.ndarray, *, allow_near_pi: bool = False) -> np.ndarray:
    """Principal logarithm as an angle-axis vector.

    Raises:
        AngleNearPi: if any angle is within ``NEAR_PI`` of pi and
            ``allow_near_pi`` is false.  With ``allow_near_pi`` the axis is
            still returned, but its choice at exactly pi is arbitrary.
    """
    r = np.asarray(r, dtype=float)
    if not allow_near_pi and np.any(angle(r) >= np.pi - NEAR_PI):
        raise AngleNearPi("rotation angle within %.1e of pi; principal axis ambiguous" % NEAR_PI)
    return _log(r)


def geodesic_distance(r: np.ndarray, s: np.ndarray) -> np.ndarray:
    """Intrinsic distance: the angle of ``r.T @ s``."""
    return angle(np.swapaxes(np.asarray(r, dtype=float), -1, -2) @ s)


def chordal_distance(r: np.ndarray, s: np.ndarray) -> np.ndarray:
    """Extrinsic (Frobenius) distance ``||r - s||_F``."""
    d = np.asarray(r, dtype=float) - s
    return np.sqrt(np.sum(d * d, axis=(-2, -1)))


def quat_to_matrix(q: np.ndarray) -> np.ndarray:
    """Unit quaternion(s) ``(w, x, y, z)`` to rotation matrix(es)."""
    q = np.asarray(q, dtype=float)
    q = q / np.linalg.norm(q, axis=-1, keepdims=True)
    w, x, y, z = np.moveaxis(q, -1, 0)
    return np.stack(
        [
            np.stack([1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)], -1),
            np.stack([2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)], -1),
            np.stack([2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)], -1),
        ],
        -2,
    )


def random_uniform(rng: np.random.Generator, size=None) -> np.ndarray:
    """Haar-uniform rotation(s) from normalized Gaussian quaternions."""
    shape = () if size is None else (size if isinstance(size, tuple) else (size,))
    q = rng.standard_normal(shape + (4,))
    return quat_to_matrix(q)


def random_tangent_gaussian(sigma: float, rng: np.random.Generator, size=None) -> np.ndarray:
    """Isotropic tangent noise: each coordinate i.i.d. N(0, sigma^2)."""
    if sigma < 0:
        raise InvalidParam("sigma must be nonnegative, got %r" % sigma)
    shape = () if size is None else (size if isinstance(size, tuple) else (size,))
    return sigma * rng.standard_normal(shape + (3,))


def is_rotation(m: np.ndarray, tol: float = 1e-12) -> bool:
    """True if every matrix in ``m`` is orthonormal with determinant +1 within ``tol``."""
    m = np.asarray(m, dtype=float)
    if m.shape[-2:] != (3, 3):
        return False
    gram = np.swapaxes(m, -1, -2) @ m - np.eye(3)
    ortho = np.sqrt(np.sum(gram * gram, axis=(-2, -1)))
    det = np.linalg.det(m)
    return bool(np.all(ortho <= tol) and np.all(np.abs(det - 1.0) <= tol))


def rotation(m) -> np.ndarray:
    """Validate and return ``m`` as a float rotation matrix (or stack)."""
    arr = np.array(m, dtype=float)
    if arr.shape[-2:] != (3, 3) and arr.shape[-1:] == (9,):
        arr = arr.reshape(arr.shape[:-1] + (3, 3))
    if not is_rotation(arr, tol=1e-9):
        raise InvalidParam("matrix is not a rotation")
    return arr
