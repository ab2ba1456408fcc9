"""Maximum-likelihood single-qubit state reconstruction from projector counts.

The state is parametrized as ``rho = T^dagger T / Tr(T^dagger T)`` with

    T = [[t0,         0 ],
         [t2 + i t3,  t1]]

so every iterate is a valid density matrix.  The default objective is the
Gaussian approximation to the count likelihood,
``sum_i (n_i - m_i)^2 / (2 m_i)``, with ``m_i`` the expected counts.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import minimize

from .detection import PROJECTORS, CountsRecord, detection_mu
from .qubit import LABEL_BLOCH, PolarizationState, fidelity, purity


class NoSignalError(ValueError):
    """All counts are zero; nothing to reconstruct."""


@dataclass
class TomographyInput:
    """Counts at one round trip.

    ``projectors`` are Bloch vectors of the measured pure projectors, in the
    same order as ``counts``.  The expected count for a projector with
    probability ``p`` is ``pulses * (1 - exp(-mu * p)) + dark``, which is
    ``pulses * mu * p`` to first order.
    """

    counts: np.ndarray
    projectors: np.ndarray
    pulses: float
    mu: float
    dark: float = 0.0

    def __post_init__(self):
        self.counts = np.asarray(self.counts, dtype=float)
        self.projectors = np.asarray(self.projectors, dtype=float).reshape(-1, 3)
        if self.counts.shape != (len(self.projectors),):
            raise ValueError("one count per projector is required")
        if np.any(self.counts < 0):
            raise ValueError("counts must be non-negative")
        if np.linalg.matrix_rank(np.column_stack([np.ones(len(self.projectors)), self.projectors])) < 4:
            raise ValueError("need at least 4 linearly independent projectors")

    @classmethod
    def from_labels(cls, counts: dict, pulses: float, mu: float, dark: float = 0.0) -> "TomographyInput":
        labels = [lab for lab in PROJECTORS if lab in counts]
        return cls(
            counts=[counts[lab] for lab in labels],
            projectors=[LABEL_BLOCH[lab] for lab in labels],
            pulses=pulses,
            mu=mu,
            dark=dark,
        )

    @classmethod
    def from_record(cls, record: CountsRecord, n: int) -> "TomographyInput":
        cfg = record.config
        return cls.from_labels(record.at(n), cfg.pulses, detection_mu(n, cfg), cfg.dark_counts)

    @property
    def scale(self) -> float:
        """Expected counts for a unit-probability projector, minus dark counts."""
        return self.pulses * -math.expm1(-self.mu)


@dataclass
class TomographyResult:
    rho: np.ndarray
    objective: float
    iterations: int
    converged: bool
    params: np.ndarray
    history: list = field(default_factory=list, repr=False)

    @property
    def bloch(self) -> np.ndarray:
        r = self.rho
        return np.array([2 * r[0, 1].real, -2 * r[0, 1].imag, (r[0, 0] - r[1, 1]).real])


def rho_from_params(t) -> np.ndarray:
    t0, t1, t2, t3 = (float(v) for v in t[:4])
    tr = t0 * t0 + t1 * t1 + t2 * t2 + t3 * t3
    if tr == 0.0:
        return 0.5 * np.eye(2, dtype=complex)
    r11 = (t0 * t0 + t2 * t2 + t3 * t3) / tr
    r12 = t1 * complex(t2, -t3) / tr
    return np.array([[r11, r12], [r12.conjugate(), t1 * t1 / tr]], dtype=complex)


def params_from_bloch(p, shrink: float = 1 - 1e-9) -> np.ndarray:
    """Cholesky-type parameters of the state with Bloch vector ``p``."""
    p = np.asarray(p, dtype=float)
    r = np.linalg.norm(p)
    if r > shrink:
        p = p * (shrink / r)
    x, y, z = p
    rho = 0.5 * np.array([[1 + z, x - 1j * y], [x + 1j * y, 1 - z]])
    # rho = T^dagger T with T lower triangular: rho22 = t1^2, rho12 = t1 (t2 - i t3)
    t1 = math.sqrt(max(rho[1, 1].real, 0.0))
    if t1 > 0:
        t2, t3 = rho[0, 1].real / t1, -rho[0, 1].imag / t1
    else:
        t2 = t3 = 0.0
    t0 = math.sqrt(max(rho[0, 0].real - t2 * t2 - t3 * t3, 0.0))
    return np.array([t0, t1, t2, t3])


def linear_inversion(data: TomographyInput) -> np.ndarray:
    """Least-squares Bloch vector from counts, not constrained to the ball.

    Solves ``c_i - dark = s (1 + b_i.P) / 2`` for the unknowns ``s`` and
    ``s P``, so the overall scale need not be known.
    """
    a = np.column_stack([np.ones(len(data.projectors)), data.projectors]) / 2
    sol, *_ = np.linalg.lstsq(a, data.counts - data.dark, rcond=None)
    if sol[0] <= 0:
        raise NoSignalError("no counts above background")
    return sol[1:] / sol[0]


def _make_objective(data: TomographyInput, likelihood: str, fit_scale: bool):
    counts = [float(c) for c in data.counts]
    proj = [tuple(float(v) for v in b) for b in data.projectors]
    pulses, mu, dark = float(data.pulses), float(data.mu), float(data.dark)
    gaussian = likelihood == "gaussian"

    def objective(t):
        t = t.tolist()
        t0, t1, t2, t3 = t[0], t[1], t[2], t[3]
        tr = t0 * t0 + t1 * t1 + t2 * t2 + t3 * t3
        if tr <= 0.0:
            return math.inf
        x = 2 * t1 * t2 / tr
        y = 2 * t1 * t3 / tr
        z = (t0 * t0 + t2 * t2 + t3 * t3 - t1 * t1) / tr
        k = mu * (t[4] if fit_scale else 1.0)
        # pins the scale of T, which rho does not depend on
        total = (tr - 1.0) ** 2
        for c, (bx, by, bz) in zip(counts, proj):
            p = 0.5 * (1 + bx * x + by * y + bz * z)
            if p < 0.0:
                p = 0.0
            m = pulses * -math.expm1(-k * p) + dark
            if gaussian:
                total += (c - m) ** 2 / (2 * m if m > 1e-12 else 2e-12)
            else:
                total += m - (c * math.log(m) if c > 0 else 0.0)
        return total

    return objective


def ml_reconstruct(
    data: TomographyInput,
    restarts: int = 10,
    seed: int = 0,
    likelihood: str = "gaussian",
    fit_scale: bool = False,
    rtol: float = 1e-10,
    max_iter: int = 10_000,
    restart_spread: float = 0.2,
) -> TomographyResult:
    """Maximum-likelihood density matrix.

    Nelder-Mead from the linear-inversion estimate and from ``restarts``
    seeded random starts scattered around it (Bloch-vector spread
    ``restart_spread``); the best local optimum is returned.  ``converged`` is
    False if the best run hit ``max_iter``.
    """
    if likelihood not in ("gaussian", "poisson"):
        raise ValueError("likelihood must be 'gaussian' or 'poisson'")
    if not np.any(data.counts > data.dark):
        raise NoSignalError("no counts above background")
    objective = _make_objective(data, likelihood, fit_scale)
    rng = np.random.default_rng(seed)

    p_lin = linear_inversion(data)
    r_lin = np.linalg.norm(p_lin)
    if r_lin > 0.95:
        p_lin = p_lin * (0.95 / r_lin)
    starts = [params_from_bloch(p_lin)]
    for _ in range(restarts):
        starts.append(params_from_bloch(p_lin + restart_spread * rng.normal(size=3)))
    if fit_scale:
        starts = [np.append(s, 1.0) for s in starts]

    def run(x0, history):
        f0 = objective(x0)
        return minimize(
            objective,
            x0,
            method="Nelder-Mead",
            callback=lambda intermediate_result: history.append(intermediate_result.fun),
            options={"xatol": 1e-10, "fatol": rtol * max(f0, 1.0), "maxiter": max_iter, "maxfev": 4 * max_iter},
        )

    best = None
    for x0 in starts:
        history = []
        res = run(x0, history)
        if best is None or res.fun < best[0].fun:
            best = (res, history)
    res, history = best
    # the simplex can collapse early near the rank-1 boundary; polish once
    polish = run(res.x, history)
    nit = res.nit + polish.nit
    if polish.fun <= res.fun:
        res = polish
    fun, x, ok = res.fun, res.x, res.status == 0
    t = np.asarray(x[:4], dtype=float)
    return TomographyResult(
        rho=rho_from_params(t), objective=float(fun), iterations=int(nit), converged=bool(ok),
        params=np.asarray(x, dtype=float), history=history,
    )


def result_to_dict(n: int, result: TomographyResult, target: Optional[PolarizationState] = None) -> dict:
    rho = result.rho
    return {
        "n": int(n),
        "rho": [[float(v.real), float(v.imag)] for v in rho.reshape(-1)],
        "purity": purity(rho),
        "fidelity_vs_target": None if target is None else fidelity(target, rho),
        "objective": result.objective,
        "iterations": result.iterations,
        "converged": result.converged,
    }


def rho_from_dict(entry: dict) -> np.ndarray:
    vals = [complex(re, im) for re, im in entry["rho"]]
    return np.array(vals, dtype=complex).reshape(2, 2)


def reconstruct_record(record: CountsRecord, target=None, restarts: int = 10, seed: int = 0, **kwargs) -> list[dict]:
    """Reconstruct every round trip of a counts record (serial)."""
    out = []
    for n in record.round_trips:
        res = ml_reconstruct(TomographyInput.from_record(record, n), restarts=restarts, seed=seed + n, **kwargs)
        out.append(result_to_dict(n, res, target))
    return out


def states_to_json(entries: list[dict], header: Optional[dict] = None) -> str:
    doc = {"schema_version": 1, "states": entries}
    if header:
        doc["config"] = header
    return json.dumps(doc, indent=2, sort_keys=True)
