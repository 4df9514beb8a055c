import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.spatial.transform import Rotation
from scipy.stats import kstest

from rotland import so3
from rotland.errors import AngleNearPi, InvalidParam

vec3 = st.lists(st.floats(-3.0, 3.0, allow_nan=False), min_size=3, max_size=3).map(np.array)
quat = st.lists(st.floats(-1.0, 1.0, allow_nan=False), min_size=4, max_size=4).map(np.array).filter(
    lambda q: np.linalg.norm(q) > 1e-3)


@given(vec3, vec3)
def test_hat_is_cross_product(v, u):
    np.testing.assert_allclose(so3.hat(v) @ u, np.cross(v, u), atol=1e-12)
    np.testing.assert_allclose(so3.vee(so3.hat(v)), v, atol=0)


def test_exp_matches_scipy(rng):
    v = rng.normal(size=(500, 3)) * rng.uniform(0, 3, size=(500, 1))
    np.testing.assert_allclose(so3.exp_map(v), Rotation.from_rotvec(v).as_matrix(), atol=1e-13)


def test_exp_small_angle_branch():
    v = np.array([3e-9, -1e-9, 2e-9])
    np.testing.assert_allclose(so3.exp_map(v), Rotation.from_rotvec(v).as_matrix(), atol=1e-17)
    np.testing.assert_allclose(so3.log_map(so3.exp_map(v)), v, rtol=1e-9)


def test_log_matches_scipy(rng):
    R = so3.random_uniform(rng, 2000)
    ref = Rotation.from_matrix(R).as_rotvec()
    keep = np.linalg.norm(ref, axis=1) < np.pi - 1e-3
    np.testing.assert_allclose(so3.log_map(R[keep]), ref[keep], atol=1e-10)


@pytest.mark.parametrize("theta", [3.0 + 1e-9, 3.05, 3.1, 3.14, math.pi - 2e-6])
def test_log_near_pi_branch(theta, rng):
    w = rng.normal(size=3)
    w /= np.linalg.norm(w)
    R = so3.exp_map(theta * w)
    v = so3.log_map(R)
    np.testing.assert_allclose(v, theta * w, atol=1e-6)
    np.testing.assert_allclose(so3.exp_map(v), R, atol=1e-12)


def test_log_at_pi_raises_unless_allowed():
    R = so3.exp_map(np.array([0.0, 0.0, math.pi]))
    with pytest.raises(AngleNearPi):
        so3.log_map(R)
    v = so3.log_map(R, allow_near_pi=True)
    assert abs(np.linalg.norm(v) - math.pi) < 1e-12
    np.testing.assert_allclose(so3.exp_map(v), R, atol=1e-12)


@given(quat)
@settings(max_examples=200)
def test_exp_log_roundtrip(q):
    R = so3.quat_to_matrix(q)
    assert so3.is_rotation(R, tol=1e-12)
    np.testing.assert_allclose(so3.exp_map(so3.log_map(R, allow_near_pi=True)), R, atol=1e-10)


def test_angle_matches_arccos(rng):
    R = so3.random_uniform(rng, 1000)
    ref = np.arccos(np.clip((np.trace(R, axis1=1, axis2=2) - 1) / 2, -1, 1))
    np.testing.assert_allclose(so3.angle(R), ref, atol=1e-7)


@given(quat, quat, quat)
def test_geodesic_metric_axioms(qa, qb, qc):
    a, b, c = so3.quat_to_matrix(qa), so3.quat_to_matrix(qb), so3.quat_to_matrix(qc)
    assert abs(so3.geodesic_distance(a, b) - so3.geodesic_distance(b, a)) < 1e-12
    assert so3.geodesic_distance(a, c) <= so3.geodesic_distance(a, b) + so3.geodesic_distance(b, c) + 1e-9
    assert 0 <= so3.geodesic_distance(a, b) <= math.pi


def test_haar_angle_distribution():
    # Haar measure on SO(3): angle density (1 - cos t) / pi on [0, pi]
    R = so3.random_uniform(np.random.default_rng(0), 20000)
    res = kstest(so3.angle(R), lambda t: (t - np.sin(t)) / np.pi)
    assert res.pvalue > 1e-3
    assert np.abs(R.mean(axis=0)).max() < 0.02


def test_tangent_gaussian(rng):
    z = so3.random_tangent_gaussian(0.2, rng, 50000)
    assert z.shape == (50000, 3)
    np.testing.assert_allclose(z.std(axis=0), 0.2, rtol=0.02)
    with pytest.raises(InvalidParam):
        so3.random_tangent_gaussian(-1.0, rng)


def test_rotation_validation():
    assert so3.rotation(np.eye(3).ravel()).shape == (3, 3)
    with pytest.raises(InvalidParam):
        so3.rotation(np.diag([1.0, 1.0, -1.0]))
    with pytest.raises(InvalidParam):
        so3.rotation(2 * np.eye(3))
    assert not so3.is_rotation(np.eye(4))


def test_broadcasting_shapes(rng):
    v = rng.normal(size=(4, 5, 3))
    R = so3.exp_map(v)
    assert R.shape == (4, 5, 3, 3)
    assert so3.log_map(R).shape == (4, 5, 3)
    assert so3.angle(R).shape == (4, 5)
