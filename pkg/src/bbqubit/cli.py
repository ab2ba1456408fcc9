"""Command-line entry point: ``bbqubit simulate | reproduce | pipeline``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import pipeline
from .analytics import SphereSampling, output_quantities
from .cavity import CavityConfig, Mode, QuadratureScheme, SpectrumModel, evolve
from .fitting import compensated_fidelity
from .qubit import PolarizationState, fidelity, purity
from .tomography import NoSignalError

PAPER_SIGMA = 8.39e-2
PAPER_PHI0 = 0.2182
FIG3_THETAS = (0.0, np.pi / 8, np.pi / 4, 3 * np.pi / 8, np.pi / 2)


def _comment(meta: dict) -> str:
    return "# " + json.dumps(meta, sort_keys=True) + "\n"


def simulate_table(state, n_max, spectrum, config, quad) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    cols = ["n", "purity", "fidelity_raw", "fidelity_compensated"]
    for ij in ("11", "12", "21", "22"):
        cols += [f"rho{ij}_re", f"rho{ij}_im"]
    w.writerow(cols)
    for n in range(n_max + 1):
        rho = evolve(state, n, spectrum, config, quad)
        row = [n, purity(rho), fidelity(state, rho), compensated_fidelity(state, rho, n, spectrum, config)]
        for v in rho.reshape(-1):
            row += [float(v.real), float(v.imag)]
        w.writerow([row[0]] + [repr(float(x)) for x in row[1:]])
    return buf.getvalue()


def cmd_simulate(args) -> int:
    spectrum = SpectrumModel(phi0=args.phi0, sigma_phi=args.sigma_phi)
    config = CavityConfig(Mode(args.mode), args.theta)
    quad = QuadratureScheme(nodes=args.quad_nodes)
    state = pipeline.parse_state(args.input_state)
    meta = {
        "command": "simulate", "mode": args.mode, "theta": args.theta, "sigma_phi": args.sigma_phi,
        "phi0": args.phi0, "n_max": args.n_max, "input_state": args.input_state, "quad_nodes": args.quad_nodes,
    }
    text = _comment(meta) + simulate_table(state, args.n_max, spectrum, config, quad)
    if args.out == "-":
        sys.stdout.write(text)
    else:
        Path(args.out).write_text(text)
    return 0


def figure2_rows(n_max: int = 40):
    spectrum = SpectrumModel(PAPER_PHI0, PAPER_SIGMA)
    rows = []
    for label in ("H", "D", "R"):
        state = PolarizationState.from_label(label)
        for bb, mode in ((0, Mode.FREE), (1, Mode.BB)):
            config = CavityConfig(mode)
            for n in range(0, n_max + 1, 2):
                q = output_quantities([state], n, spectrum, config)
                rows.append([label, bb, n // 2, n] + [float(q[k][0]) for k in ("purity", "fidelity_raw", "fidelity")])
    return rows


def figure3_rows(n_max: int = 40, points: int = 256):
    spectrum = SpectrumModel(PAPER_PHI0, PAPER_SIGMA)
    sampling = SphereSampling(points)
    rows = []
    for theta in FIG3_THETAS:
        for bb, mode in ((0, Mode.FREE_SB), (1, Mode.BB_SB)):
            config = CavityConfig(mode, theta)
            for n in range(0, n_max + 1, 2):
                q = output_quantities(sampling.states(), n, spectrum, config)
                rows.append([theta, bb, n // 2, n] + [float(np.mean(q[k])) for k in ("purity", "fidelity_raw", "fidelity")])
    return rows


def _write_rows(path: Path, meta: dict, header, rows):
    buf = io.StringIO()
    buf.write(_comment(meta))
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in r])
    path.write_text(buf.getvalue())


def cmd_reproduce(args) -> int:
    from .plotting import line_chart

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    meta = {"command": "reproduce", "figure": args.figure, "sigma_phi": PAPER_SIGMA, "phi0": PAPER_PHI0, "n_max": args.n_max}
    if args.figure == 2:
        rows = figure2_rows(args.n_max)
        header = ["state", "bb", "double_round_trips", "n", "purity", "fidelity_raw", "fidelity_compensated"]
        _write_rows(out / "figure2.csv", meta, header, rows)
        panels = []
        for bb, title in ((0, "without BB"), (1, "with BB")):
            series = []
            for label, color in (("H", "k"), ("D", "r"), ("R", "b")):
                sel = [r for r in rows if r[0] == label and r[1] == bb]
                xs = [r[2] for r in sel]
                series.append((f"{label} purity", xs, [r[4] for r in sel], f"{color}-"))
                series.append((f"{label} fidelity", xs, [r[6] for r in sel], f"{color}--"))
            panels.append((title, series))
        line_chart(out / "figure2.svg", panels, "double round trips", "purity / fidelity")
    else:
        meta["theta"] = list(FIG3_THETAS)
        meta["sphere_points"] = args.sphere_points
        rows = figure3_rows(args.n_max, args.sphere_points)
        header = ["theta", "bb", "double_round_trips", "n", "purity", "fidelity_raw", "fidelity_compensated"]
        _write_rows(out / "figure3.csv", meta, header, rows)
        panels = []
        for bb, title in ((0, "without BB"), (1, "with BB")):
            series = []
            for theta in FIG3_THETAS:
                sel = [r for r in rows if r[0] == theta and r[1] == bb]
                xs = [r[2] for r in sel]
                series.append((f"theta={theta:.3f} P", xs, [r[4] for r in sel], "-"))
                series.append((f"theta={theta:.3f} F", xs, [r[6] for r in sel], "--"))
            panels.append((title, series))
        line_chart(out / "figure3.svg", panels, "double round trips", "Bloch-averaged purity / fidelity", ylim=(0.6, 1.02))
    return 0


def cmd_pipeline(args) -> int:
    doc = {}
    if args.config:
        doc = json.loads(Path(args.config).read_text())
        if not isinstance(doc, dict):
            raise ValueError("config must be a JSON object")
    overrides = {
        "seed": args.seed, "counts": args.counts, "sigma_phi": args.sigma_phi, "phi0": args.phi0,
        "mode": args.mode, "theta": args.theta, "input_state": args.input_state, "n_min": args.n_min,
        "n_max": args.n_max, "restarts": args.restarts, "workers": args.workers,
    }
    doc.update({k: v for k, v in overrides.items() if v is not None})
    if args.joint_fit:
        doc["joint_fit"] = True
    config = pipeline.PipelineConfig.from_json(json.dumps(doc))
    result = pipeline.run(config)
    paths = pipeline.write_outputs(config, result, args.out_dir)
    print(f"sigma_phi = {result.fit.sigma_phi:.6f} +- {result.fit.std_error:.6f} rad")
    for name, p in paths.items():
        if not name.startswith("histogram"):
            print(f"wrote {p}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bbqubit", description="Polarization-qubit decoherence in a ring cavity with bang-bang decoupling.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="purity/fidelity versus round trip for one configuration")
    p.add_argument("--mode", choices=[m.value for m in Mode], default="free")
    p.add_argument("--theta", type=float, default=0.0, help="S-B angle in rad")
    p.add_argument("--sigma-phi", type=float, default=PAPER_SIGMA)
    p.add_argument("--phi0", type=float, default=PAPER_PHI0)
    p.add_argument("--n-max", type=int, default=40)
    p.add_argument("--input-state", default="D", help="H, V, D, A, R, L or a Bloch vector x,y,z")
    p.add_argument("--quad-nodes", type=int, default=64)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("reproduce", help="regenerate figure data and plots")
    p.add_argument("--figure", type=int, choices=(2, 3), required=True)
    p.add_argument("--out-dir", default="out")
    p.add_argument("--n-max", type=int, default=40)
    p.add_argument("--sphere-points", type=int, default=256)
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("pipeline", aliases=["synth-tomo-fit"], help="synthetic counts -> ML tomography -> sigma_phi fit")
    p.add_argument("--config", help="JSON config file; flags override its values")
    p.add_argument("--out-dir", default="out")
    p.add_argument("--seed", type=int)
    p.add_argument("--counts", type=float, help="expected counts per setting at n=1")
    p.add_argument("--sigma-phi", type=float)
    p.add_argument("--phi0", type=float)
    p.add_argument("--mode", choices=[m.value for m in Mode])
    p.add_argument("--theta", type=float)
    p.add_argument("--input-state")
    p.add_argument("--n-min", type=int)
    p.add_argument("--n-max", type=int)
    p.add_argument("--restarts", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--joint-fit", action="store_true", help="also fit phi0")
    p.set_defaults(func=cmd_pipeline)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "n_max", None) is not None and args.n_max < 0:
            raise ValueError("--n-max must be non-negative")
        return args.func(args)
    except NoSignalError as exc:
        print(f"error: no signal: {exc}", file=sys.stderr)
        return 3
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
