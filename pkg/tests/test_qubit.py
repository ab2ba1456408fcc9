import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bbqubit.qubit import (
    I2,
    X,
    Y,
    Z,
    PolarizationState,
    angle_axis_of,
    bloch_vector,
    check_density_matrix,
    conjugate,
    density_from_bloch,
    equal_up_to_phase,
    fidelity,
    purity,
    rotation_unitary,
)


def expm_series(a, terms=60):
    """Matrix exponential by truncated Taylor series."""
    out = np.eye(2, dtype=complex)
    term = np.eye(2, dtype=complex)
    for k in range(1, terms):
        term = term @ a / k
        out = out + term
    return out


def random_unitary(rng):
    z = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / abs(np.diag(r)))


unit_vectors = st.tuples(*[st.floats(-1, 1)] * 3).filter(lambda v: 0.1 < np.linalg.norm(v)).map(
    lambda v: np.array(v) / np.linalg.norm(v)
)


def test_pauli_algebra():
    for p in (X, Y, Z):
        np.testing.assert_allclose(p @ p, I2, atol=1e-15)
    np.testing.assert_allclose(X @ Y, 1j * Z, atol=1e-15)
    np.testing.assert_allclose(Y @ Z, 1j * X, atol=1e-15)
    np.testing.assert_allclose(Z @ X, 1j * Y, atol=1e-15)


def test_z_convention():
    h = PolarizationState.from_label("H").ket
    v = PolarizationState.from_label("V").ket
    np.testing.assert_allclose(Z, np.outer(h, h) - np.outer(v, v))


def test_state_normalization_enforced():
    with pytest.raises(ValueError):
        PolarizationState(1.0, 0.1)


@pytest.mark.parametrize("label,bloch", [("H", [0, 0, 1]), ("V", [0, 0, -1]), ("D", [1, 0, 0]),
                                         ("A", [-1, 0, 0]), ("R", [0, 1, 0]), ("L", [0, -1, 0])])
def test_label_bloch(label, bloch):
    np.testing.assert_allclose(PolarizationState.from_label(label).bloch, bloch, atol=1e-15)


def test_rotation_zero_is_identity():
    np.testing.assert_allclose(rotation_unitary(0.0, [0, 0, 1]), I2)


def test_rotation_half_pi_about_y():
    u = rotation_unitary(np.pi / 2, [0, 1, 0])
    np.testing.assert_allclose(u, -1j * Y, atol=1e-15)
    assert equal_up_to_phase(u, 1j * Y) == pytest.approx(1.0, abs=1e-15)


def test_rotation_matches_series():
    u = rotation_unitary(np.pi / 3, [1, 0, 0])
    np.testing.assert_allclose(u, expm_series(-1j * np.pi / 3 * X), atol=1e-14)
    assert u[0, 0] == pytest.approx(np.cos(np.pi / 3))
    assert u[0, 1] == pytest.approx(-1j * np.sin(np.pi / 3))


def test_rotation_rejects_non_unit_axis():
    with pytest.raises(ValueError):
        rotation_unitary(0.3, [1, 1, 0])


def test_angle_axis_identity():
    alpha, axis, _ = angle_axis_of(I2)
    assert alpha == 0.0
    np.testing.assert_array_equal(axis, [0, 0, 1])


def test_angle_axis_iy_recomposes():
    alpha, axis, g = angle_axis_of(1j * Y)
    assert alpha == pytest.approx(np.pi / 2)
    np.testing.assert_allclose(axis, [0, 1, 0], atol=1e-15)
    assert abs(g) == pytest.approx(np.pi)
    np.testing.assert_allclose(np.exp(1j * g) * rotation_unitary(alpha, axis), 1j * Y, atol=1e-12)


def test_angle_axis_diagonal():
    alpha, axis, g = angle_axis_of(expm_series(-1j * 0.3 * Z))
    assert alpha == pytest.approx(0.3, abs=1e-12)
    np.testing.assert_allclose(axis, [0, 0, 1], atol=1e-12)
    assert g == pytest.approx(0.0, abs=1e-12)


def test_angle_axis_minus_identity():
    alpha, axis, g = angle_axis_of(-I2)
    np.testing.assert_allclose(np.exp(1j * g) * rotation_unitary(alpha, axis), -I2, atol=1e-12)


def test_angle_axis_rejects_non_unitary():
    with pytest.raises(ValueError):
        angle_axis_of(np.array([[1, 1], [0, 1]], dtype=complex))


@settings(max_examples=200, deadline=None)
@given(alpha=st.floats(0.01, np.pi - 0.01), axis=unit_vectors)
def test_angle_axis_roundtrip(alpha, axis):
    a, s, g = angle_axis_of(rotation_unitary(alpha, axis))
    assert a == pytest.approx(alpha, abs=1e-9)
    np.testing.assert_allclose(s, axis, atol=1e-9)
    assert g == pytest.approx(0.0, abs=1e-12)


def test_angle_axis_random_unitaries_recompose():
    rng = np.random.default_rng(0)
    for _ in range(200):
        u = random_unitary(rng)
        a, s, g = angle_axis_of(u)
        assert 0 <= a <= np.pi
        np.testing.assert_allclose(np.exp(1j * g) * rotation_unitary(a, s), u, atol=1e-10)


def test_conjugation_preserves_spectrum():
    rng = np.random.default_rng(1)
    for _ in range(100):
        p = rng.normal(size=3)
        p *= rng.uniform() / np.linalg.norm(p)
        rho = density_from_bloch(p)
        out = conjugate(rho, random_unitary(rng))
        check_density_matrix(out, atol=1e-12)
        np.testing.assert_allclose(np.linalg.eigvalsh(out), np.linalg.eigvalsh(rho), atol=1e-10)


def test_purity_examples():
    assert purity(PolarizationState.from_label("H").projector()) == pytest.approx(1.0)
    assert purity(I2 / 2) == pytest.approx(0.5)
    rho = density_from_bloch([0.6, 0, 0])
    direct = np.trace(rho @ rho).real
    assert purity(rho) == pytest.approx(direct) == pytest.approx(0.68)


@settings(max_examples=100, deadline=None)
@given(v=unit_vectors, r=st.floats(0, 1))
def test_purity_bloch_identity(v, r):
    rho = density_from_bloch(r * v)
    assert purity(rho) == pytest.approx((1 + r * r) / 2, abs=1e-12)
    np.testing.assert_allclose(bloch_vector(rho), r * v, atol=1e-12)


def test_fidelity_examples():
    h = PolarizationState.from_label("H")
    assert fidelity(h, h.projector()) == pytest.approx(1.0)
    assert fidelity(PolarizationState.from_label("D"), I2 / 2) == pytest.approx(0.5)
    rho = density_from_bloch([0, 0, 0.5])
    assert fidelity(h, rho) == pytest.approx(rho[0, 0].real) == pytest.approx(0.75)


def test_from_bloch_roundtrip():
    rng = np.random.default_rng(2)
    for _ in range(50):
        v = rng.normal(size=3)
        v /= np.linalg.norm(v)
        np.testing.assert_allclose(PolarizationState.from_bloch(v).bloch, v, atol=1e-12)


def test_check_density_matrix_rejects():
    with pytest.raises(ValueError):
        check_density_matrix(np.diag([1.2, -0.2]))
    with pytest.raises(ValueError):
        check_density_matrix(np.array([[0.5, 0.1], [0.2, 0.5]]))
    with pytest.raises(ValueError):
        density_from_bloch([1, 1, 0])
