"""Exact 2x2 operator and state algebra for a polarization qubit.

Basis order is (|H>, |V>) throughout, with Z = |H><H| - |V><V| and
X = |H><V| + |V><H|.  Density matrices and unitaries are plain complex
``numpy`` arrays of shape ``(2, 2)``; the helpers below validate them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = np.stack([X, Y, Z])

_SQRT_HALF = np.sqrt(0.5)

# Bloch vectors of the six tomography states.  R is taken as +y.
LABEL_BLOCH = {
    "H": (0.0, 0.0, 1.0),
    "V": (0.0, 0.0, -1.0),
    "D": (1.0, 0.0, 0.0),
    "A": (-1.0, 0.0, 0.0),
    "R": (0.0, 1.0, 0.0),
    "L": (0.0, -1.0, 0.0),
}


@dataclass(frozen=True)
class PolarizationState:
    """Pure polarization state alpha_h |H> + alpha_v |V>."""

    alpha_h: complex
    alpha_v: complex

    def __post_init__(self):
        norm = abs(self.alpha_h) ** 2 + abs(self.alpha_v) ** 2
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"state is not normalized: |a_H|^2 + |a_V|^2 = {norm!r}")

    @classmethod
    def from_label(cls, label: str) -> "PolarizationState":
        """One of H, V, D, A, R, L."""
        kets = {
            "H": (1.0, 0.0),
            "V": (0.0, 1.0),
            "D": (_SQRT_HALF, _SQRT_HALF),
            "A": (_SQRT_HALF, -_SQRT_HALF),
            "R": (_SQRT_HALF, 1j * _SQRT_HALF),
            "L": (_SQRT_HALF, -1j * _SQRT_HALF),
        }
        try:
            a, b = kets[label.upper()]
        except KeyError:
            raise ValueError(f"unknown polarization label {label!r}") from None
        return cls(complex(a), complex(b))

    @classmethod
    def from_bloch(cls, vector) -> "PolarizationState":
        x, y, z = (float(c) for c in vector)
        r = np.sqrt(x * x + y * y + z * z)
        if abs(r - 1.0) > 1e-9:
            raise ValueError("pure state needs a unit Bloch vector")
        x, y, z = x / r, y / r, z / r
        theta = np.arccos(np.clip(z, -1.0, 1.0))
        phi = np.arctan2(y, x)
        a = complex(np.cos(theta / 2))
        b = complex(np.exp(1j * phi) * np.sin(theta / 2))
        n = np.sqrt(abs(a) ** 2 + abs(b) ** 2)
        return cls(a / n, b / n)

    @property
    def ket(self) -> np.ndarray:
        return np.array([self.alpha_h, self.alpha_v], dtype=complex)

    def projector(self) -> np.ndarray:
        k = self.ket
        return np.outer(k, k.conj())

    @property
    def bloch(self) -> np.ndarray:
        return bloch_vector(self.projector())


def density_from_bloch(vector) -> np.ndarray:
    """rho = (I + P.sigma) / 2."""
    p = np.asarray(vector, dtype=float)
    if np.linalg.norm(p) > 1 + 1e-10:
        raise ValueError("Bloch vector longer than 1")
    return 0.5 * (I2 + np.tensordot(p, PAULIS, axes=1))


def bloch_vector(rho) -> np.ndarray:
    """Bloch vector (Tr(rho X), Tr(rho Y), Tr(rho Z)); works on stacks."""
    rho = np.asarray(rho)
    return np.real(np.einsum("...ij,kji->...k", rho, PAULIS))


def check_density_matrix(rho, atol: float = 1e-12, eig_tol: float = 1e-10) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got shape {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T)) > atol:
        raise ValueError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1.0) > atol:
        raise ValueError("density matrix does not have unit trace")
    if np.min(np.linalg.eigvalsh(rho)) < -eig_tol:
        raise ValueError("density matrix is not positive semidefinite")
    return rho


def is_unitary(u, atol: float = 1e-12) -> bool:
    u = np.asarray(u, dtype=complex)
    if u.shape != (2, 2):
        return False
    return bool(np.max(np.abs(u.conj().T @ u - I2)) <= atol and abs(abs(np.linalg.det(u)) - 1) <= atol)


def rotation_unitary(alpha: float, axis) -> np.ndarray:
    """exp(-i alpha axis.sigma) = cos(alpha) I - i sin(alpha) axis.sigma.

    On the Bloch sphere this is a rotation by ``2 * alpha`` about ``axis``.
    """
    n = np.asarray(axis, dtype=float)
    if n.shape != (3,) or abs(np.linalg.norm(n) - 1.0) > 1e-9:
        raise ValueError("rotation axis must be a unit 3-vector")
    return np.cos(alpha) * I2 - 1j * np.sin(alpha) * np.tensordot(n, PAULIS, axes=1)


def su2_coefficients(u) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Split stacked unitaries as u = exp(i g) (a0 I - i a.sigma).

    Returns ``(a0, a, g)`` with ``g = arg(det u) / 2`` on the principal
    branch.  Broadcasts over leading axes.
    """
    u = np.asarray(u, dtype=complex)
    g = 0.5 * np.angle(np.linalg.det(u))
    v = u * np.exp(-1j * g)[..., None, None]
    a0 = 0.5 * np.real(v[..., 0, 0] + v[..., 1, 1])
    # Tr(v sigma_k) = -2i a_k
    a = np.real(0.5j * np.einsum("...ij,kji->...k", v, PAULIS))
    return a0, a, g


def angle_axis_of(u, atol: float = 1e-10) -> tuple[float, np.ndarray, float]:
    """Decompose a 2x2 unitary into ``(alpha, axis, global_phase)``.

    ``exp(i global_phase) * rotation_unitary(alpha, axis)`` reproduces ``u``
    with ``alpha`` in [0, pi].  When ``sin(alpha) < 1e-12`` the axis is
    undefined and reported as z.  At ``alpha = pi/2`` the pairs
    ``(axis, phase)`` and ``(-axis, phase + pi)`` coincide; the axis whose
    first nonzero component is positive is returned.
    """
    u = np.asarray(u, dtype=complex)
    if not is_unitary(u, atol=atol):
        raise ValueError("angle_axis_of needs a unitary matrix")
    a0, a, g = su2_coefficients(u)
    s = float(np.linalg.norm(a))
    alpha = float(np.arctan2(s, a0))
    if s < 1e-12:
        if a0 < 0:
            # -I: alpha = pi about any axis
            return np.pi, np.array([0.0, 0.0, 1.0]), float(g)
        return 0.0, np.array([0.0, 0.0, 1.0]), float(g)
    axis = a / s
    if abs(a0) < 1e-12:
        lead = axis[np.flatnonzero(np.abs(axis) > 1e-12)[0]]
        if lead < 0:
            axis = -axis
            g = float(np.angle(-np.exp(1j * g)))
    return alpha, axis, float(g)


def equal_up_to_phase(u, v) -> float:
    """|Tr(u^dagger v)| / 2; equals 1 iff u and v differ by a global phase."""
    return float(abs(np.trace(np.asarray(u).conj().T @ np.asarray(v))) / 2)


def conjugate(rho, u) -> np.ndarray:
    u = np.asarray(u)
    return u @ rho @ u.conj().T


def purity(rho) -> float:
    """Tr(rho^2)."""
    rho = np.asarray(rho)
    return float(np.real(np.einsum("ij,ji->", rho, rho)))


def fidelity(pure_in: PolarizationState, rho_out) -> float:
    """<pi_in| rho_out |pi_in>."""
    k = pure_in.ket
    return float(np.real(k.conj() @ np.asarray(rho_out) @ k))


def mixed_fidelity(rho, sigma) -> float:
    """Uhlmann fidelity of two qubit states, Tr(rho sigma) + 2 sqrt(det rho det sigma)."""
    rho, sigma = np.asarray(rho), np.asarray(sigma)
    det_term = np.sqrt(max(np.real(np.linalg.det(rho)) * np.real(np.linalg.det(sigma)), 0.0))
    return float(np.real(np.trace(rho @ sigma)) + 2 * det_term)
