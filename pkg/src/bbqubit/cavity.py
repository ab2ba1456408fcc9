"""Round-trip polarization unitaries and the frequency-averaged output state.

A frequency component of the pulse acquires a relative H/V phase ``phi`` at
each 45 degree plane mirror.  The pulse spectrum induces a Gaussian measure
on ``phi``; averaging ``U(phi)^n |pi><pi| U(phi)^n^dagger`` over that measure
gives the output polarization density matrix after ``n`` round trips.
"""

from __future__ import annotations

import enum
import functools
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .qubit import I2, X, Z, PolarizationState

__all__ = [
    "Mode",
    "SpectrumModel",
    "CavityConfig",
    "QuadratureScheme",
    "mirror_unitary",
    "sb_unitary",
    "round_trip_unitary",
    "round_trip_power",
    "evolve",
    "evolve_many",
    "evolve_monte_carlo",
    "mc_phi_samples",
    "gauss_hermite_phi",
    "compensation_unitary",
]


class Mode(str, enum.Enum):
    FREE = "free"
    FREE_SB = "free_sb"
    BB = "bb"
    BB_SB = "bb_sb"

    @property
    def decoupled(self) -> bool:
        return self in (Mode.BB, Mode.BB_SB)

    @property
    def uses_theta(self) -> bool:
        return self in (Mode.FREE_SB, Mode.BB_SB)


@dataclass(frozen=True)
class SpectrumModel:
    """Gaussian measure on the mirror phase induced by the pulse spectrum.

    The density is ``(pi sigma_phi^2)^(-1/2) exp(-(phi - phi0)^2 / sigma_phi^2)``,
    i.e. ``phi`` has variance ``sigma_phi**2 / 2``.  This matches a spectrum
    ``|E(w)|^2 ~ exp(-(w - w0)^2 / sigma_w^2)`` with ``phi = phi0 + tau (w - w0)``
    and ``sigma_phi = tau * sigma_w``, and yields the purity law
    ``[1 + exp(-2 n^2 sigma_phi^2)] / 2`` for equatorial inputs.

    ``lambda0_nm``, ``delta_lambda_nm`` and ``tau_s`` are informational.
    """

    phi0: float = 0.2182
    sigma_phi: float = 8.39e-2
    lambda0_nm: Optional[float] = None
    delta_lambda_nm: Optional[float] = None
    tau_s: Optional[float] = None

    def __post_init__(self):
        if not self.sigma_phi >= 0:
            raise ValueError("sigma_phi must be non-negative")

    @property
    def variance(self) -> float:
        return 0.5 * self.sigma_phi**2


@dataclass(frozen=True)
class CavityConfig:
    mode: Mode = Mode.FREE
    theta: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        if not 0.0 <= self.theta < 2 * np.pi:
            raise ValueError("theta must lie in [0, 2*pi)")
        if not self.mode.uses_theta and self.theta != 0.0:
            raise ValueError(f"mode {self.mode.value} does not use theta")


@dataclass(frozen=True)
class QuadratureScheme:
    kind: str = "gauss_hermite"
    nodes: int = 64
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("gauss_hermite", "monte_carlo"):
            raise ValueError(f"unknown quadrature kind {self.kind!r}")
        minimum = 2 if self.kind == "gauss_hermite" else 1000
        if self.nodes < minimum:
            raise ValueError(f"{self.kind} needs at least {minimum} nodes, got {self.nodes}")


DEFAULT_QUADRATURE = QuadratureScheme()


def mirror_unitary(phi) -> np.ndarray:
    """M_Z = Z exp(-i phi Z / 2); broadcasts over ``phi``."""
    phi = np.asarray(phi, dtype=float)
    out = np.zeros(phi.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = np.exp(-0.5j * phi)
    out[..., 1, 1] = -np.exp(0.5j * phi)
    return out


def sb_unitary(theta: float) -> np.ndarray:
    """Soleil-Babinet retarder at 45 degrees, exp(-i theta X / 2)."""
    return np.cos(theta / 2) * I2 - 1j * np.sin(theta / 2) * X


def round_trip_unitary(phi, config: CavityConfig) -> np.ndarray:
    """Polarization unitary for one cavity round trip.

    FREE    exp(-i phi Z)           (= M_Z M_Z)
    FREE_SB N N,       N = M_Z B_X(theta)
    BB      Z M_Z X M_Z             (= X Z for every phi)
    BB_SB   Z N X N

    ``phi`` may be an array; the result then has shape ``phi.shape + (2, 2)``.
    """
    m = mirror_unitary(phi)
    mode = config.mode
    if mode is Mode.FREE:
        return m @ m
    if mode is Mode.BB:
        return Z @ m @ X @ m
    n = m @ sb_unitary(config.theta)
    if mode is Mode.FREE_SB:
        return n @ n
    return Z @ n @ X @ n


def round_trip_power(phi, n: int, config: CavityConfig) -> np.ndarray:
    if n < 0:
        raise ValueError("round-trip count must be non-negative")
    return np.linalg.matrix_power(round_trip_unitary(phi, config), n)


def compensation_unitary(n: int, spectrum: SpectrumModel, config: CavityConfig) -> np.ndarray:
    """Deterministic mean evolution ``U(phi0)^n`` undone by compensated fidelity."""
    return round_trip_power(spectrum.phi0, n, config)


def gauss_hermite_phi(spectrum: SpectrumModel, nodes: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights for averages over the phase measure.

    With ``phi = phi0 + sigma_phi * x`` the measure becomes
    ``exp(-x^2) dx / sqrt(pi)``, which is exactly the physicists' Hermite
    weight, so no rescaling by sqrt(2) is needed.
    """
    x, w = _hermite_rule(nodes)
    return spectrum.phi0 + spectrum.sigma_phi * x, w / np.sqrt(np.pi)


@functools.lru_cache(maxsize=16)
def _hermite_rule(nodes: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.hermite.hermgauss(nodes)
    x.flags.writeable = False
    w.flags.writeable = False
    return x, w


def mc_phi_samples(spectrum: SpectrumModel, count: int, seed: int) -> np.ndarray:
    """I.i.d. draws of phi: mean phi0, variance sigma_phi^2 / 2."""
    if count < 1:
        raise ValueError("count must be at least 1")
    rng = np.random.default_rng(seed)
    return spectrum.phi0 + np.sqrt(spectrum.variance) * rng.standard_normal(count)


def _as_kets(states) -> np.ndarray:
    if isinstance(states, PolarizationState):
        return states.ket[None, :]
    kets = []
    for s in states:
        kets.append(s.ket if isinstance(s, PolarizationState) else np.asarray(s, dtype=complex))
    return np.array(kets, dtype=complex).reshape(-1, 2)


def evolve_many(
    states,
    n: int,
    spectrum: SpectrumModel,
    config: CavityConfig,
    quad: QuadratureScheme = DEFAULT_QUADRATURE,
) -> np.ndarray:
    """Output density matrices for a batch of pure inputs, shape ``(m, 2, 2)``."""
    kets = _as_kets(states)
    if quad.kind == "monte_carlo":
        phis = mc_phi_samples(spectrum, quad.nodes, quad.seed)
        weights = np.full(phis.shape, 1.0 / phis.size)
    elif spectrum.sigma_phi == 0.0:
        phis, weights = np.array([spectrum.phi0]), np.array([1.0])
    else:
        phis, weights = gauss_hermite_phi(spectrum, quad.nodes)
    un = round_trip_power(phis, n, config)
    out = np.einsum("kij,mj->kmi", un, kets)
    rho = np.einsum("kmi,kmj,k->mij", out, out.conj(), weights)
    return 0.5 * (rho + np.conj(np.swapaxes(rho, -1, -2)))


def evolve(
    state: PolarizationState,
    n: int,
    spectrum: SpectrumModel,
    config: CavityConfig,
    quad: QuadratureScheme = DEFAULT_QUADRATURE,
) -> np.ndarray:
    """Frequency-averaged output state after ``n`` single round trips."""
    return evolve_many([state], n, spectrum, config, quad)[0]


def evolve_monte_carlo(
    state: PolarizationState,
    n: int,
    spectrum: SpectrumModel,
    config: CavityConfig,
    samples: int = 1_000_000,
    seed: int = 0,
    chunk: int = 250_000,
) -> tuple[np.ndarray, np.ndarray]:
    """Monte-Carlo estimate of the output state and per-entry standard errors.

    The standard errors are reported separately for the real and imaginary
    parts as ``stderr.real`` and ``stderr.imag``.
    """
    phis = mc_phi_samples(spectrum, samples, seed)
    ket = state.ket
    s1 = np.zeros((2, 2), dtype=complex)
    s2_re = np.zeros((2, 2))
    s2_im = np.zeros((2, 2))
    for start in range(0, samples, chunk):
        block = phis[start:start + chunk]
        psi = np.einsum("kij,j->ki", round_trip_power(block, n, config), ket)
        r = psi[:, :, None] * psi[:, None, :].conj()
        s1 += r.sum(axis=0)
        s2_re += (r.real**2).sum(axis=0)
        s2_im += (r.imag**2).sum(axis=0)
    mean = s1 / samples
    var_re = np.maximum(s2_re / samples - mean.real**2, 0.0) * samples / max(samples - 1, 1)
    var_im = np.maximum(s2_im / samples - mean.imag**2, 0.0) * samples / max(samples - 1, 1)
    stderr = np.sqrt(var_re / samples) + 1j * np.sqrt(var_im / samples)
    return mean, stderr

