"""Estimate the phase spread (and mean phase) from reconstructed states."""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import least_squares, minimize_scalar

from .analytics import output_quantities, purity_closed_form
from .cavity import CavityConfig, SpectrumModel, compensation_unitary
from .qubit import PolarizationState, fidelity, purity

SIGMA_GRID = np.linspace(0.0, 0.5, 500)


@dataclass(frozen=True)
class SigmaFit:
    sigma_phi: float
    std_error: float
    objective: float
    flat: bool = False


def _purity_objective(sigma, n, p, w):
    model = purity_closed_form(n[:, None], np.atleast_1d(sigma)[None, :])
    return np.sum(w[:, None] * (p[:, None] - model) ** 2, axis=0)


def fit_sigma_phi(series: Sequence[tuple[int, float]], weights=None) -> SigmaFit:
    """Least-squares fit of ``[1 + exp(-2 n^2 sigma^2)] / 2`` to (n, purity) pairs.

    A 500-point grid on [0, 0.5] rad brackets the minimum, which is then
    refined by bounded Brent/golden-section search.  The standard error comes
    from the curvature of the objective at the minimum.
    """
    data = np.asarray(series, dtype=float)
    if data.ndim != 2 or data.shape[0] < 3:
        raise ValueError("need at least 3 (n, purity) points")
    n, p = data[:, 0], data[:, 1].copy()
    if np.any((p < 0.5) | (p > 1.0)):
        warnings.warn("purities outside [1/2, 1] clamped", RuntimeWarning, stacklevel=2)
        p = np.clip(p, 0.5, 1.0)
    w = np.ones_like(p) if weights is None else np.asarray(weights, dtype=float)

    if np.all(np.abs(1.0 - p) < 1e-12):
        return SigmaFit(0.0, 0.0, float(_purity_objective(0.0, n, p, w)[0]), flat=True)

    f = lambda s: float(_purity_objective(s, n, p, w)[0])
    grid_vals = _purity_objective(SIGMA_GRID, n, p, w)
    k = int(np.argmin(grid_vals))
    lo = SIGMA_GRID[max(k - 1, 0)]
    hi = SIGMA_GRID[min(k + 1, len(SIGMA_GRID) - 1)]
    res = minimize_scalar(f, bounds=(lo, hi), method="bounded", options={"xatol": 1e-12})
    sigma = float(res.x) if res.fun <= grid_vals[k] else float(SIGMA_GRID[k])
    fmin = f(sigma)

    h = 1e-4 * max(sigma, 1e-2)
    if sigma > h:
        curv = (f(sigma + h) - 2 * fmin + f(sigma - h)) / h**2
    else:
        curv = (f(sigma + 2 * h) - 2 * f(sigma + h) + fmin) / h**2
    if curv <= 0:
        return SigmaFit(sigma, float("inf"), fmin, flat=True)
    if weights is None:
        resid_var = fmin / max(len(p) - 1, 1)
        std = np.sqrt(2 * resid_var / curv)
    else:
        std = np.sqrt(2 / curv)
    return SigmaFit(sigma, float(std), fmin)


@dataclass(frozen=True)
class JointFit:
    sigma_phi: float
    phi0: float
    std_sigma: float
    std_phi0: float
    chi2: float
    identifiable: bool


def compensated_fidelity(state: PolarizationState, rho, n: int, spectrum: SpectrumModel, config: CavityConfig) -> float:
    """Fidelity after undoing the mean rotation ``U(phi0)^n``."""
    comp = compensation_unitary(n, spectrum, config)
    return fidelity(state, comp.conj().T @ np.asarray(rho) @ comp)


def _joint_residuals(params, ns, rhos, state, config):
    s2, phi0 = params
    spectrum = SpectrumModel(phi0=phi0, sigma_phi=float(np.sqrt(max(s2, 0.0))))
    res = []
    for n, rho in zip(ns, rhos):
        model = output_quantities([state], n, spectrum, config)
        res.append(purity(rho) - model["purity"][0])
        res.append(compensated_fidelity(state, rho, n, spectrum, config) - model["fidelity"][0])
    return np.array(res)


def fit_joint(
    series: Sequence[tuple[int, np.ndarray]],
    state: PolarizationState,
    config: CavityConfig,
    phi0_grid: int = 90,
) -> JointFit:
    """Fit sigma_phi and phi0 to purity and rotation-compensated fidelity.

    Works in ``sigma_phi**2`` so that ``sigma_phi = 0`` is an ordinary
    boundary point.  ``phi0`` is determined modulo pi.
    """
    if len(series) < 4:
        raise ValueError("need at least 4 reconstructed states")
    ns = [int(n) for n, _ in series]
    rhos = [np.asarray(r, dtype=complex) for _, r in series]

    try:
        s0 = fit_sigma_phi([(n, min(max(purity(r), 0.5), 1.0)) for n, r in zip(ns, rhos)]).sigma_phi
    except ValueError:
        s0 = 0.05
    s0 = min(max(s0, 1e-3), 0.45)
    cost = lambda x: float(np.sum(_joint_residuals(x, ns, rhos, state, config) ** 2))
    phis = -np.pi / 2 + np.pi * np.arange(phi0_grid) / phi0_grid
    start_phi = min(phis, key=lambda ph: cost((s0**2, ph)))

    res = least_squares(
        _joint_residuals,
        x0=[s0**2, start_phi],
        bounds=([0.0, -np.pi], [0.25, np.pi]),
        args=(ns, rhos, state, config),
        x_scale=[1e-3, 1e-1],
        xtol=1e-15,
        ftol=1e-15,
        gtol=1e-15,
        max_nfev=2000,
    )
    s2, phi0 = float(res.x[0]), float(res.x[1])
    phi0 = float((phi0 + np.pi / 2) % np.pi - np.pi / 2)
    sigma = float(np.sqrt(max(s2, 0.0)))

    jac = np.asarray(res.jac)
    dof = max(jac.shape[0] - 2, 1)
    chi2 = float(2 * res.cost)
    # finite parameter moves that leave every residual unchanged mean the
    # data carry no information on that parameter
    base = _joint_residuals((s2, phi0), ns, rhos, state, config)
    moves = [((s2 + 1e-4, phi0), 1e-4), ((s2, phi0 + 1e-3), 1e-3)]
    identifiable = all(
        np.max(np.abs(_joint_residuals(x, ns, rhos, state, config) - base)) > 1e-7 * step
        for x, step in moves
    )
    if identifiable:
        cov = np.linalg.pinv(jac.T @ jac) * (chi2 / dof)
        var_s2, var_phi = float(cov[0, 0]), float(cov[1, 1])
        std_sigma = np.sqrt(var_s2) / (2 * sigma) if sigma > 0 else np.sqrt(np.sqrt(var_s2))
        std_phi = np.sqrt(var_phi)
    else:
        std_sigma = std_phi = float("inf")
    return JointFit(sigma, phi0, float(std_sigma), float(std_phi), chi2, identifiable)


def fit_report(fit: SigmaFit, phi0: Optional[float] = None, header: Optional[dict] = None) -> str:
    doc = {
        "schema_version": 1,
        "sigma_phi": fit.sigma_phi,
        "std_error": fit.std_error,
        "phi0": phi0,
        "chi2": fit.objective,
        "flat": fit.flat,
    }
    if header:
        doc["config"] = header
    return json.dumps(doc, indent=2, sort_keys=True)
