import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spinberry.errors import PoleSingularity, ZeroSpinVector
from spinberry.spin import (
    angles_from_spin,
    canonical_spinor,
    cartesian_discrepancy,
    cartesian_spinor_uncorrected,
    check_off_pole,
    spin_from_angles,
    spin_vector_from_spinor,
    spinor_from_angles,
    spinor_from_cartesian,
)

finite = st.floats(-10, 10, allow_nan=False)
spins = st.tuples(finite, finite, finite).map(np.array).filter(
    lambda s: np.hypot(s[0], s[1]) > 1e-6 * max(np.linalg.norm(s), 1e-300) and np.linalg.norm(s) > 1e-3
)


@pytest.mark.parametrize(
    "s,theta,phi",
    [((0, 0, 1), 0.0, 0.0), ((1, 0, 0), np.pi / 2, 0.0), ((0, -1, 0), np.pi / 2, -np.pi / 2)],
)
def test_angles_examples(s, theta, phi):
    t, p = angles_from_spin(np.array(s, dtype=float))
    assert t == pytest.approx(theta)
    assert p == pytest.approx(phi)


def test_phi_range_includes_pi():
    _, phi = angles_from_spin(np.array([-1.0, -0.0, 0.0]))
    assert phi == pytest.approx(np.pi)


def test_spinor_from_angles_examples():
    np.testing.assert_allclose(spinor_from_angles(0.0, 0.0), [1, 0])
    np.testing.assert_allclose(spinor_from_angles(np.pi / 2, 0.0), [2**-0.5, 2**-0.5])
    w = spinor_from_angles(np.pi / 2, np.pi / 2)
    np.testing.assert_allclose(w, [np.exp(-1j * np.pi / 4) / 2**0.5, np.exp(1j * np.pi / 4) / 2**0.5])
    np.testing.assert_allclose(spin_vector_from_spinor(w), [0, 1, 0], atol=1e-15)


def test_spin_vector_examples():
    np.testing.assert_allclose(spin_vector_from_spinor([1, 0]), [0, 0, 1])
    np.testing.assert_allclose(spin_vector_from_spinor([0, 1]), [0, 0, -1])
    w = [np.cos(np.pi / 8), np.sin(np.pi / 8)]
    np.testing.assert_allclose(spin_vector_from_spinor(w), [np.sin(np.pi / 4), 0, np.cos(np.pi / 4)], atol=1e-15)


def test_cartesian_equator_limit():
    w = spinor_from_cartesian(np.array([1.0, 1e-12, 0.0]))
    np.testing.assert_allclose(np.abs(w), [2**-0.5, 2**-0.5], atol=1e-12)


@pytest.mark.parametrize("s", [(0, 1, 0), (0, -1, 0), (0.3, -0.5, 0.2), (-0.7, 0.1, -0.4)])
def test_cartesian_round_trip(s):
    s = np.array(s, dtype=float)
    w = spinor_from_cartesian(s)
    np.testing.assert_allclose(spin_vector_from_spinor(w), s / np.linalg.norm(s), atol=1e-12)


def test_cartesian_negative_sy_is_conjugate_branch():
    s = np.array([0.3, 0.5, 0.2])
    mirrored = s * [1, -1, 1]
    np.testing.assert_allclose(spinor_from_cartesian(mirrored), np.conj(spinor_from_cartesian(s)))


def test_printed_cartesian_form_is_reported_as_inconsistent(rng):
    s = rng.normal(size=(200, 3))
    s[:, 1] = np.abs(s[:, 1])
    err = cartesian_discrepancy(s)
    assert err.shape == (200,)
    assert np.max(err) > 1e-2
    w = cartesian_spinor_uncorrected(s)
    assert w.shape == (200, 2)


@settings(max_examples=300, deadline=None)
@given(spins)
def test_round_trip_through_angles(s):
    t, p = angles_from_spin(s)
    out = spin_vector_from_spinor(spinor_from_angles(t, p))
    np.testing.assert_allclose(out, s / np.linalg.norm(s), atol=1e-12)


def test_round_trip_batch(rng):
    s = rng.normal(size=(1000, 3)) * rng.uniform(0.01, 100, size=(1000, 1))
    out = spin_vector_from_spinor(canonical_spinor(s))
    np.testing.assert_allclose(out, s / np.linalg.norm(s, axis=1, keepdims=True), atol=1e-12)


@settings(max_examples=100, deadline=None)
@given(spins, st.floats(-20, 20))
def test_gauge_invariance(s, chi):
    w = canonical_spinor(s)
    np.testing.assert_allclose(spin_vector_from_spinor(np.exp(1j * chi) * w), spin_vector_from_spinor(w), atol=1e-14)


@settings(max_examples=200, deadline=None)
@given(spins)
def test_antipodal_orthogonality(s):
    assert abs(np.vdot(canonical_spinor(s), canonical_spinor(-s))) < 1e-12


def test_double_valuedness(rng):
    theta, phi = rng.uniform(0.1, 3.0, 50), rng.uniform(-np.pi, np.pi, 50)
    a, b = spinor_from_angles(theta, phi), spinor_from_angles(theta, phi + 2 * np.pi)
    np.testing.assert_allclose(b, -a, atol=1e-14)
    np.testing.assert_allclose(spin_vector_from_spinor(a), spin_vector_from_spinor(b), atol=1e-14)


def test_spin_from_angles_inverse(rng):
    s = spin_from_angles(rng.uniform(0.01, 3.1, 20), rng.uniform(-3, 3, 20))
    t, p = angles_from_spin(s)
    np.testing.assert_allclose(spin_from_angles(t, p), s, atol=1e-14)


def test_zero_spin_vector_rejected():
    with pytest.raises(ZeroSpinVector):
        canonical_spinor(np.zeros(3))


def test_pole_guard():
    with pytest.raises(PoleSingularity):
        check_off_pole(np.array([1e-9, 0, 1.0]))
    check_off_pole(np.array([1e-5, 0, 1.0]))
