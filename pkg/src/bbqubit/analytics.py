"""Closed-form rotation angles, axes and decay laws.

A round trip (FREE_SB) or a round trip with decoupling controls (BB_SB) is a
rotation ``exp(-i alpha s.sigma)``.  Index ``"fe"`` refers to free evolution
and ``"bb"`` to evolution with bang-bang controls.  FREE and BB are the
``theta = 0`` cases of the two families.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .cavity import (
    DEFAULT_QUADRATURE,
    CavityConfig,
    QuadratureScheme,
    SpectrumModel,
    compensation_unitary,
    evolve_many,
    round_trip_power,
)
from .qubit import PAULIS, PolarizationState, su2_coefficients

_Z_AXIS = np.array([0.0, 0.0, 1.0])
FD_STEP = 1e-6


class Axis(NamedTuple):
    vector: np.ndarray
    degenerate: bool


def family(config: CavityConfig) -> tuple[str, float]:
    """Map a cavity configuration to its rotation family and S-B angle."""
    return ("bb" if config.mode.decoupled else "fe"), float(config.theta)


def alpha_fe(phi, theta):
    """Free-evolution angle: sin(alpha/2) = sin(phi/2) cos(theta/2)."""
    return 2 * np.arcsin(np.sin(np.asarray(phi) / 2) * np.cos(np.asarray(theta) / 2))


def alpha_bb(phi, theta):
    """Decoupled angle: cos(alpha) = -sin(phi) sin(theta) / 2, in [0, pi]."""
    return np.arccos(-np.sin(np.asarray(phi)) * np.sin(np.asarray(theta)) / 2)


def _normalized(raw, sin_alpha) -> Axis:
    if abs(sin_alpha) < 1e-12:
        return Axis(_Z_AXIS.copy(), True)
    v = np.asarray(raw, dtype=float) / sin_alpha
    return Axis(v, False)


def axis_fe(phi: float, theta: float) -> Axis:
    a = float(alpha_fe(phi, theta))
    raw = [
        np.sin(theta) * (np.cos(phi) - 1),
        np.sin(theta) * np.sin(phi),
        (1 + np.cos(theta)) * np.sin(phi),
    ]
    return _normalized(np.array(raw) / 2, np.sin(a))


def axis_bb(phi: float, theta: float) -> Axis:
    a = float(alpha_bb(phi, theta))
    s2t = np.sin(theta / 2) ** 2
    s2p = np.sin(phi / 2) ** 2
    raw = [-np.sin(phi) * s2t, 1 - 2 * s2t * s2p, -np.sin(theta) * s2p]
    return _normalized(raw, np.sin(a))


def alpha_of(kind: str, phi, theta):
    if kind == "fe":
        return alpha_fe(phi, theta)
    if kind == "bb":
        return alpha_bb(phi, theta)
    raise ValueError(f"unknown rotation family {kind!r}")


def axis_of(kind: str, phi: float, theta: float) -> Axis:
    if kind == "fe":
        return axis_fe(phi, theta)
    if kind == "bb":
        return axis_bb(phi, theta)
    raise ValueError(f"unknown rotation family {kind!r}")


def alpha_dot0(kind: str, theta: float, spectrum: SpectrumModel, step: float = FD_STEP) -> float:
    """d(alpha)/d(phi) at phi0, by central finite difference."""
    phi0 = spectrum.phi0
    return float((alpha_of(kind, phi0 + step, theta) - alpha_of(kind, phi0 - step, theta)) / (2 * step))


def alpha_dot0_small_phase(kind: str, theta: float) -> float:
    """Small-phi0 approximations cos(theta/2) and sin(theta/2) cos(theta/2)."""
    if kind == "fe":
        return float(np.cos(theta / 2))
    if kind == "bb":
        return float(np.sin(theta / 2) * np.cos(theta / 2))
    raise ValueError(f"unknown rotation family {kind!r}")


def purity_closed_form(n, sigma_phi):
    """[1 + exp(-2 n^2 sigma_phi^2)] / 2 (FREE mode, equatorial input)."""
    n = np.asarray(n, dtype=float)
    return 0.5 * (1 + np.exp(-2 * n**2 * np.asarray(sigma_phi) ** 2))


def _bloch(state) -> np.ndarray:
    if isinstance(state, PolarizationState):
        return state.bloch
    return np.asarray(state, dtype=float)


def small_n_infidelity(n: int, config: CavityConfig, spectrum: SpectrumModel, bloch_in) -> float:
    """Quadratic small-n law n^2 [alpha_dot0 sigma_phi]^2 {1 - (P.s)^2} / 2.

    The axis is frozen at its value at ``phi0``.  Approximates both
    ``1 - F`` (rotation-compensated) and ``(1 - P) / 2``.
    """
    kind, theta = family(config)
    p = _bloch(bloch_in)
    s = axis_of(kind, spectrum.phi0, theta).vector
    ad = alpha_dot0(kind, theta, spectrum)
    return float(n**2 * (ad * spectrum.sigma_phi) ** 2 * (1 - np.dot(p, s) ** 2) / 2)


def first_order_infidelity(
    n: int, config: CavityConfig, spectrum: SpectrumModel, bloch_in, step: float = FD_STEP
) -> float:
    """Leading-order infidelity including the phase dependence of the axis.

    Writes ``U(phi0)^-n U(phi)^n = exp(-i (phi - phi0) g.sigma + ...)`` and
    returns ``Var(phi) (|g|^2 - (g.P)^2)``.  Reduces to
    :func:`small_n_infidelity` when the axis does not move with ``phi``.
    """
    p = _bloch(bloch_in)
    w_plus, w_minus = (
        compensation_unitary(n, spectrum, config).conj().T @ round_trip_power(spectrum.phi0 + h, n, config)
        for h in (step, -step)
    )
    g = []
    for w in (w_plus, w_minus):
        _, a, _ = su2_coefficients(w)
        g.append(a)
    gen = (g[0] - g[1]) / (2 * step)
    return float(spectrum.variance * (gen @ gen - (gen @ p) ** 2))


def asymptotic_value(bloch_in, axis) -> float:
    """Large-n purity and fidelity {1 + (P.s)^2} / 2 (pointer basis +-s)."""
    c = float(np.dot(_bloch(bloch_in), np.asarray(axis, dtype=float)))
    return 0.5 * (1 + c * c)


class LinearizedOutput(NamedTuple):
    purity: float
    fidelity: float
    fidelity_raw: float


def linearized_output(n: int, config: CavityConfig, spectrum: SpectrumModel, bloch_in) -> LinearizedOutput:
    """Closed-form output with the axis frozen and the angle linear in phi.

    The Bloch component along ``s`` is kept, the orthogonal part rotates by
    ``2 n alpha0`` and shrinks by ``exp(-n^2 alpha_dot0^2 sigma_phi^2)``.
    Valid for any ``n``; this is the path used for large-n asymptotics.
    """
    kind, theta = family(config)
    p = _bloch(bloch_in)
    ax = axis_of(kind, spectrum.phi0, theta)
    c = float(np.dot(p, ax.vector))
    perp = 1 - c * c
    a0 = float(alpha_of(kind, spectrum.phi0, theta))
    ad = alpha_dot0(kind, theta, spectrum)
    damp = np.exp(-(n**2) * ad**2 * spectrum.sigma_phi**2)
    return LinearizedOutput(
        purity=float(0.5 * (1 + c * c + damp**2 * perp)),
        fidelity=float(0.5 * (1 + c * c + damp * perp)),
        fidelity_raw=float(0.5 * (1 + c * c + damp * np.cos(2 * n * a0) * perp)),
    )


@dataclass(frozen=True)
class SphereSampling:
    """Deterministic Fibonacci lattice on the Bloch sphere."""

    points: int = 256

    def vectors(self) -> np.ndarray:
        k = np.arange(self.points) + 0.5
        z = 1 - 2 * k / self.points
        r = np.sqrt(1 - z * z)
        golden = np.pi * (3 - np.sqrt(5))
        phi = golden * k
        return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])

    def states(self) -> list[PolarizationState]:
        return [PolarizationState.from_bloch(v) for v in self.vectors()]


QUANTITIES = ("purity", "fidelity", "fidelity_raw")


def output_quantities(states, n: int, spectrum: SpectrumModel, config: CavityConfig,
                      quad: QuadratureScheme = DEFAULT_QUADRATURE) -> dict[str, np.ndarray]:
    """Purity, compensated fidelity and raw fidelity for a batch of inputs."""
    kets = np.array([s.ket for s in states])
    rhos = evolve_many(states, n, spectrum, config, quad)
    comp = compensation_unitary(n, spectrum, config)
    back = np.einsum("ji,mjk,kl->mil", comp.conj(), rhos, comp)
    return {
        "purity": np.real(np.einsum("mij,mji->m", rhos, rhos)),
        "fidelity": np.real(np.einsum("mi,mij,mj->m", kets.conj(), back, kets)),
        "fidelity_raw": np.real(np.einsum("mi,mij,mj->m", kets.conj(), rhos, kets)),
    }


def bloch_average(
    quantity: str,
    n: int,
    spectrum: SpectrumModel,
    config: CavityConfig,
    sample_spec: SphereSampling = SphereSampling(),
    method: str = "quadrature",
    quad: QuadratureScheme = DEFAULT_QUADRATURE,
) -> float:
    """Average purity or fidelity over pure inputs spread on the Bloch sphere.

    ``quantity`` is ``"purity"``, ``"fidelity"`` (rotation-compensated) or
    ``"fidelity_raw"``.  ``method="linearized"`` uses
    :func:`linearized_output` instead of quadrature and is cheap at large n.
    """
    if quantity not in QUANTITIES:
        raise ValueError(f"quantity must be one of {QUANTITIES}")
    if method == "quadrature":
        vals = output_quantities(sample_spec.states(), n, spectrum, config, quad)[quantity]
    elif method == "linearized":
        idx = QUANTITIES.index(quantity)
        vals = np.array([linearized_output(n, config, spectrum, v)[idx] for v in sample_spec.vectors()])
    else:
        raise ValueError(f"unknown method {method!r}")
    return float(np.mean(vals))


def recompose(kind: str, phi: float, theta: float) -> np.ndarray:
    """Rotation matrix exp(-i alpha s.sigma) from the closed-form angle and axis."""
    a = float(alpha_of(kind, phi, theta))
    s = axis_of(kind, phi, theta).vector
    return np.cos(a) * np.eye(2) - 1j * np.sin(a) * np.tensordot(s, PAULIS, axes=1)
