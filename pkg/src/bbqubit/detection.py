"""Synthetic photodetection: per-round-trip rates, Poisson counts, TAC/MCA histograms."""

from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .qubit import PolarizationState

PROJECTORS = ("H", "V", "D", "A", "R", "L")
PROJECTOR_INDEX = {label: i for i, label in enumerate(PROJECTORS)}
HISTOGRAM_BINS = 8192


@dataclass(frozen=True)
class DetectionConfig:
    """Photon budget and timing of the detection chain.

    ``survival`` is the intracavity round-trip survival probability
    (spherical mirror 0.98 times two plane mirrors 0.99).  ``dark_counts``
    is a mean number of flat background counts per peak window.
    """

    mu_in: float = 1.0
    extraction: float = 0.04
    survival: float = 0.98 * 0.99**2
    detector_efficiency: float = 0.5
    pulses: int = 10_000_000
    round_trip_ns: float = 6.80
    bin_ps: float = 102.0
    window_bins: int = 10
    dark_counts: float = 0.0

    def __post_init__(self):
        for name in ("extraction", "survival", "detector_efficiency"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must be a probability, got {v}")
        if self.mu_in < 0 or self.pulses < 0 or self.dark_counts < 0:
            raise ValueError("mu_in, pulses and dark_counts must be non-negative")
        if self.window_bins < 1 or self.bin_ps <= 0 or self.round_trip_ns <= 0:
            raise ValueError("invalid timing parameters")

    @property
    def round_trip_bins(self) -> float:
        return self.round_trip_ns * 1000.0 / self.bin_ps

    def digest(self) -> str:
        blob = json.dumps(asdict(self), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


def detection_mu(n: int, config: DetectionConfig) -> float:
    """Mean detected photon number per pulse at round trip ``n`` (n >= 1)."""
    if n < 1:
        raise ValueError("round trips are counted from 1")
    return config.mu_in * config.survival ** (n - 1) * config.extraction * config.detector_efficiency


def multiphoton_fraction(mu: float) -> float:
    """P(k >= 2 | k >= 1) for Poissonian photon number with mean ``mu``."""
    if mu <= 0:
        return 0.0
    return float(-np.expm1(-mu) - mu * np.exp(-mu)) / float(-np.expm1(-mu))


def projector_matrix(label: str) -> np.ndarray:
    return PolarizationState.from_label(label).projector()


def projector_probability(rho, label: str) -> float:
    p = float(np.real(np.trace(projector_matrix(label) @ np.asarray(rho))))
    return min(max(p, 0.0), 1.0)


def expected_counts(n: int, probability: float, config: DetectionConfig) -> float:
    """Mean click count: pulses (1 - exp(-mu p)) plus dark counts."""
    mu = detection_mu(n, config)
    return config.pulses * float(-np.expm1(-mu * probability)) + config.dark_counts


def setting_rng(seed: int, n: int, label: str) -> np.random.Generator:
    """Independent stream per (seed, n, projector); order of draws is irrelevant."""
    return np.random.default_rng([seed, n, PROJECTOR_INDEX[label]])


def sample_counts(state_at_n, n: int, projector: str, config: DetectionConfig, seed: int) -> int:
    """Poisson photocount for one tomography setting."""
    p = projector_probability(state_at_n, projector)
    mean = expected_counts(n, p, config)
    return int(setting_rng(seed, n, projector).poisson(mean))


@dataclass
class CountsRecord:
    """Counts keyed by ``(n, projector)``."""

    counts: dict = field(default_factory=dict)
    seed: int = 0
    config: DetectionConfig = field(default_factory=DetectionConfig)

    def __post_init__(self):
        for (n, label), c in self.counts.items():
            if label not in PROJECTOR_INDEX:
                raise ValueError(f"unknown projector {label!r}")
            if c < 0:
                raise ValueError("counts must be non-negative")

    @property
    def round_trips(self) -> list[int]:
        return sorted({n for n, _ in self.counts})

    def at(self, n: int) -> dict[str, int]:
        return {label: self.counts[(n, label)] for label in PROJECTORS if (n, label) in self.counts}

    def is_complete(self) -> bool:
        return all((n, label) in self.counts for n in self.round_trips for label in PROJECTORS)

    def to_csv(self, header: dict | None = None) -> str:
        buf = io.StringIO()
        meta = {"seed": self.seed, "config_hash": self.config.digest(), "config": asdict(self.config)}
        if header:
            meta.update(header)
        buf.write("# " + json.dumps(meta, sort_keys=True) + "\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "projector", "counts"])
        for n in self.round_trips:
            for label in PROJECTORS:
                if (n, label) in self.counts:
                    w.writerow([n, label, self.counts[(n, label)]])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "CountsRecord":
        meta = {}
        rows = []
        for line in text.splitlines():
            if line.startswith("#"):
                try:
                    meta.update(json.loads(line[1:]))
                except json.JSONDecodeError:
                    pass
            elif line.strip():
                rows.append(line)
        reader = csv.DictReader(rows)
        if reader.fieldnames != ["n", "projector", "counts"]:
            raise ValueError(f"unexpected CSV header {reader.fieldnames}")
        counts = {(int(r["n"]), r["projector"]): int(r["counts"]) for r in reader}
        config = DetectionConfig(**meta["config"]) if "config" in meta else DetectionConfig()
        return cls(counts=counts, seed=int(meta.get("seed", 0)), config=config)

    def to_json(self) -> str:
        doc = {
            "schema_version": 1,
            "seed": self.seed,
            "config": asdict(self.config),
            "config_hash": self.config.digest(),
            "counts": [
                {"n": n, "projector": label, "counts": self.counts[(n, label)]}
                for n in self.round_trips
                for label in PROJECTORS
                if (n, label) in self.counts
            ],
        }
        return json.dumps(doc, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "CountsRecord":
        doc = json.loads(text)
        counts = {(int(c["n"]), c["projector"]): int(c["counts"]) for c in doc["counts"]}
        return cls(counts=counts, seed=int(doc["seed"]), config=DetectionConfig(**doc["config"]))


def simulate_counts(states_by_n: dict, config: DetectionConfig, seed: int) -> CountsRecord:
    """Counts for every projector at every round trip in ``states_by_n``."""
    counts = {}
    for n in sorted(states_by_n):
        for label in PROJECTORS:
            counts[(n, label)] = sample_counts(states_by_n[n], n, label, config, seed)
    return CountsRecord(counts=counts, seed=seed, config=config)


# --- TAC/MCA histogram -------------------------------------------------------


def peak_center(n: int, config: DetectionConfig) -> int:
    return int(round(n * config.round_trip_bins))


def _window(n: int, config: DetectionConfig) -> tuple[int, int]:
    start = peak_center(n, config) - config.window_bins // 2
    return start, start + config.window_bins


def peak_profile(window_bins: int) -> np.ndarray:
    """Fixed triangular intra-peak profile, normalized to 1."""
    k = np.arange(window_bins)
    w = np.minimum(k + 1, window_bins - k).astype(float)
    return w / w.sum()


def _check_windows(config: DetectionConfig):
    if config.round_trip_bins < config.window_bins:
        raise ValueError("peak windows overlap: round trip shorter than the integration window")


def _spread(total: int, profile: np.ndarray) -> np.ndarray:
    # largest-remainder allocation: exact integer conservation
    raw = total * profile
    base = np.floor(raw).astype(np.int64)
    rest = total - int(base.sum())
    if rest:
        order = np.argsort(-(raw - base), kind="stable")
        base[order[:rest]] += 1
    return base


def build_histogram(counts_by_n: dict[int, int], config: DetectionConfig) -> np.ndarray:
    """Distribute each round trip's counts over its peak window."""
    _check_windows(config)
    hist = np.zeros(HISTOGRAM_BINS, dtype=np.int64)
    profile = peak_profile(config.window_bins)
    for n, c in counts_by_n.items():
        lo, hi = _window(n, config)
        if lo < 0 or hi > HISTOGRAM_BINS:
            raise ValueError(f"peak of round trip {n} lies outside the {HISTOGRAM_BINS}-channel span")
        hist[lo:hi] += _spread(int(c), profile)
    return hist


def integrate_peaks(histogram, config: DetectionConfig, round_trips=None) -> dict[int, int]:
    """Sum ``window_bins`` channels around each peak."""
    _check_windows(config)
    hist = np.asarray(histogram)
    if round_trips is None:
        n_max = int((HISTOGRAM_BINS - config.window_bins) // config.round_trip_bins)
        round_trips = [n for n in range(1, n_max + 1) if _window(n, config)[1] <= HISTOGRAM_BINS]
    out = {}
    for n in round_trips:
        lo, hi = _window(n, config)
        if lo < 0 or hi > HISTOGRAM_BINS:
            raise ValueError(f"peak of round trip {n} lies outside the histogram")
        out[n] = int(hist[lo:hi].sum())
    return out


def histogram_to_csv(histogram) -> str:
    buf = io.StringIO()
    buf.write("bin_index,count\n")
    for i, c in enumerate(np.asarray(histogram)):
        buf.write(f"{i},{int(c)}\n")
    return buf.getvalue()
