"""End-to-end synthetic experiment: evolution, photocounts, tomography, fit."""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Optional


from .cavity import CavityConfig, Mode, SpectrumModel, evolve
from .detection import (
    PROJECTORS,
    CountsRecord,
    DetectionConfig,
    build_histogram,
    detection_mu,
    histogram_to_csv,
    integrate_peaks,
    simulate_counts,
)
from .fitting import SigmaFit, fit_joint, fit_report, fit_sigma_phi
from .qubit import LABEL_BLOCH, PolarizationState, mixed_fidelity
from .tomography import TomographyInput, ml_reconstruct, result_to_dict, rho_from_dict, states_to_json

SCHEMA_VERSION = 1


def parse_state(spec) -> PolarizationState:
    """A label (H, V, D, A, R, L) or a Bloch vector "x,y,z"."""
    if isinstance(spec, PolarizationState):
        return spec
    if isinstance(spec, str) and spec.upper() in LABEL_BLOCH:
        return PolarizationState.from_label(spec)
    if isinstance(spec, str):
        vec = [float(v) for v in spec.split(",")]
    else:
        vec = [float(v) for v in spec]
    if len(vec) != 3:
        raise ValueError(f"cannot parse input state {spec!r}")
    return PolarizationState.from_bloch(vec)


@dataclass
class PipelineConfig:
    seed: int = 1
    phi0: float = 0.2182
    sigma_phi: float = 8.39e-2
    mode: str = "free"
    theta: float = 0.0
    input_state: str = "D"
    n_min: int = 1
    n_max: int = 15
    counts: float = 1e5
    restarts: int = 3
    likelihood: str = "gaussian"
    joint_fit: bool = False
    workers: int = 1
    detection: dict = field(default_factory=dict)

    def __post_init__(self):
        Mode(self.mode)
        if self.n_min < 1 or self.n_max < self.n_min:
            raise ValueError("need 1 <= n_min <= n_max")
        if self.counts < 0:
            raise ValueError("counts must be non-negative")
        if self.workers < 1:
            raise ValueError("workers must be positive")
        unknown = set(self.detection) - {f.name for f in fields(DetectionConfig)} - {"pulses"}
        if unknown:
            raise ValueError(f"unknown detection fields: {sorted(unknown)}")
        parse_state(self.input_state)

    @classmethod
    def from_json(cls, text: str) -> "PipelineConfig":
        doc = json.loads(text)
        if not isinstance(doc, dict):
            raise ValueError("config must be a JSON object")
        version = doc.pop("schema_version", SCHEMA_VERSION)
        if version != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema_version {version}")
        known = {f.name for f in fields(cls)}
        extra = set(doc) - known
        if extra:
            raise ValueError(f"unknown config fields: {sorted(extra)}")
        return cls(**doc)

    def to_dict(self) -> dict:
        """Recorded configuration; ``workers`` is omitted as it cannot affect results."""
        d = asdict(self)
        del d["workers"]
        d["schema_version"] = SCHEMA_VERSION
        return d

    def spectrum(self) -> SpectrumModel:
        return SpectrumModel(phi0=self.phi0, sigma_phi=self.sigma_phi)

    def cavity(self) -> CavityConfig:
        return CavityConfig(Mode(self.mode), self.theta)

    def detection_config(self) -> DetectionConfig:
        base = DetectionConfig(**{k: v for k, v in self.detection.items() if k != "pulses"})
        # ``counts`` = expected clicks at n = 1 for a unit-probability projector
        mu1 = detection_mu(1, base)
        pulses = int(round(self.counts / mu1)) if mu1 > 0 else 0
        return replace(base, pulses=pulses)

    @property
    def round_trips(self) -> list[int]:
        return list(range(self.n_min, self.n_max + 1))


@dataclass
class PipelineResult:
    record: CountsRecord
    states: list
    fit: SigmaFit
    phi0: Optional[float]
    truth: dict


def _reconstruct_one(args):
    record, n, restarts, seed, likelihood, target = args
    res = ml_reconstruct(TomographyInput.from_record(record, n), restarts=restarts, seed=seed, likelihood=likelihood)
    return result_to_dict(n, res, target)


def histogram_roundtrip(record: CountsRecord) -> tuple[CountsRecord, dict]:
    """Pass each projector's counts through a TAC/MCA histogram and back."""
    hists = {}
    counts = {}
    ns = record.round_trips
    for label in PROJECTORS:
        per_n = {n: record.counts[(n, label)] for n in ns if (n, label) in record.counts}
        hist = build_histogram(per_n, record.config)
        hists[label] = hist
        for n, c in integrate_peaks(hist, record.config, round_trips=list(per_n)).items():
            counts[(n, label)] = c
    return CountsRecord(counts=counts, seed=record.seed, config=record.config), hists


def run(config: PipelineConfig) -> PipelineResult:
    """Deterministic for a given config; independent of ``workers``."""
    spectrum, cavity = config.spectrum(), config.cavity()
    target = parse_state(config.input_state)
    truth = {n: evolve(target, n, spectrum, cavity) for n in config.round_trips}
    record = simulate_counts(truth, config.detection_config(), config.seed)
    record, _ = histogram_roundtrip(record)

    jobs = [(record, n, config.restarts, config.seed * 100_003 + n, config.likelihood, target) for n in config.round_trips]
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            states = list(pool.map(_reconstruct_one, jobs))
    else:
        states = [_reconstruct_one(j) for j in jobs]

    fit = fit_sigma_phi([(s["n"], s["purity"]) for s in states])
    phi0 = None
    if config.joint_fit:
        joint = fit_joint([(s["n"], rho_from_dict(s)) for s in states], target, cavity)
        phi0 = joint.phi0
    return PipelineResult(record=record, states=states, fit=fit, phi0=phi0, truth=truth)


def write_outputs(config: PipelineConfig, result: PipelineResult, out_dir) -> dict[str, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    header = config.to_dict()
    paths = {
        "counts_csv": out / "counts.csv",
        "counts_json": out / "counts.json",
        "states": out / "states.json",
        "fit": out / "fit.json",
    }
    paths["counts_csv"].write_text(result.record.to_csv(header={"pipeline": header}))
    paths["counts_json"].write_text(result.record.to_json())
    paths["states"].write_text(states_to_json(result.states, header))
    paths["fit"].write_text(fit_report(result.fit, result.phi0, header))
    _, hists = histogram_roundtrip(result.record)
    for label, hist in hists.items():
        p = out / f"histogram_{label}.csv"
        p.write_text(f"# {json.dumps({'projector': label, 'seed': config.seed}, sort_keys=True)}\n" + histogram_to_csv(hist))
        paths[f"histogram_{label}"] = p
    return paths


def estimate_sigma(config: PipelineConfig) -> tuple[float, list[float]]:
    """Fitted sigma_phi and per-n fidelities of the reconstructions to truth."""
    res = run(config)
    fids = []
    for s in res.states:
        rho_hat = rho_from_dict(s)
        true = res.truth[s["n"]]
        fids.append(mixed_fidelity(true, rho_hat))
    return res.fit.sigma_phi, fids

