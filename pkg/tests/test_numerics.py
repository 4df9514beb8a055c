import numpy as np
import pytest
from scipy.linalg import polar

from rotland import so3
from rotland.errors import Degenerate, EigenFailure
from rotland.numerics import orthonormal_complement, project_to_so3, sym_eig


def test_sym_eig_known_spectrum(rng):
    Q = so3.random_uniform(rng)
    M = Q @ np.diag([3.0, -1.0, 0.5]) @ Q.T
    w, v = sym_eig(M)
    np.testing.assert_allclose(w, [-1.0, 0.5, 3.0], atol=1e-13)
    np.testing.assert_allclose(v.T @ v, np.eye(3), atol=1e-13)
    np.testing.assert_allclose(M @ v, v * w, atol=1e-13)


def test_sym_eig_symmetrizes():
    M = np.array([[2.0, 1.0 + 1e-12], [1.0, 2.0]])
    np.testing.assert_allclose(sym_eig(M).values, [1.0, 3.0], atol=1e-11)


def test_sym_eig_errors():
    with pytest.raises(ValueError):
        sym_eig(np.zeros((2, 3)))
    with pytest.raises(EigenFailure):
        sym_eig(np.eye(3), rtol=-1.0)
    assert sym_eig(np.zeros((0, 0))).values.shape == (0,)


def test_project_matches_polar_factor(rng):
    for _ in range(50):
        M = so3.random_uniform(rng) + 0.3 * rng.normal(size=(3, 3))
        if np.linalg.det(M) <= 0:
            continue
        np.testing.assert_allclose(project_to_so3(M), polar(M)[0], atol=1e-12)


def test_project_fixes_reflections(rng):
    M = rng.normal(size=(20, 3, 3))
    R = project_to_so3(M)
    assert so3.is_rotation(R, tol=1e-12)
    # no rotation is closer than the projection
    trial = so3.random_uniform(rng, (20, 200))
    best = np.linalg.norm(M - R, axis=(1, 2))
    assert np.all(np.linalg.norm(M[:, None] - trial, axis=(2, 3)) >= best[:, None] - 1e-12)


def test_project_rejects_singular():
    with pytest.raises(Degenerate):
        project_to_so3(np.zeros((3, 3)))


def test_orthonormal_complement(rng):
    u = rng.normal(size=(2, 7))
    u = np.linalg.qr(u.T)[0].T
    C = orthonormal_complement(u)
    assert C.shape == (7, 5)
    np.testing.assert_allclose(C.T @ C, np.eye(5), atol=1e-13)
    np.testing.assert_allclose(u @ C, 0, atol=1e-13)
    np.testing.assert_array_equal(C, orthonormal_complement(u))
