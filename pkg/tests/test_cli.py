import csv
import json
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from bbqubit.cli import main


def read_table(path):
    lines = [ln for ln in path.read_text().splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(lines))


def header(path):
    first = path.read_text().splitlines()[0]
    assert first.startswith("# ")
    return json.loads(first[2:])


def test_simulate_bb_preserves_at_even_n(tmp_path):
    out = tmp_path / "bb.csv"
    assert main(["simulate", "--mode", "bb", "--theta", "0", "--n-max", "20", "--input-state", "D", "--out", str(out)]) == 0
    rows = read_table(out)
    assert [int(r["n"]) for r in rows] == list(range(21))
    for r in rows:
        if int(r["n"]) % 2 == 0:
            assert float(r["purity"]) == pytest.approx(1.0, abs=1e-12)
    assert header(out)["mode"] == "bb"


def test_simulate_zero_spread(tmp_path):
    out = tmp_path / "s0.csv"
    assert main(["simulate", "--sigma-phi", "0", "--out", str(out)]) == 0
    assert all(float(r["purity"]) == pytest.approx(1.0, abs=1e-12) for r in read_table(out))


def test_simulate_free_purity_at_ten(tmp_path):
    out = tmp_path / "free.csv"
    assert main(["simulate", "--mode", "free", "--sigma-phi", "0.0839", "--input-state", "D", "--out", str(out)]) == 0
    rows = read_table(out)
    assert float(rows[10]["purity"]) == pytest.approx(0.622, abs=5e-4)
    rho = np.array([complex(float(rows[10][f"rho{ij}_re"]), float(rows[10][f"rho{ij}_im"])) for ij in ("11", "12", "21", "22")])
    assert rho[0].real + rho[3].real == pytest.approx(1.0)
    assert set(rows[0]) >= {"fidelity_raw", "fidelity_compensated"}


def test_simulate_rejects_bad_flags(tmp_path, capsys):
    assert main(["simulate", "--mode", "free_sb", "--theta", "9", "--out", str(tmp_path / "x.csv")]) != 0
    assert main(["simulate", "--input-state", "Q", "--out", str(tmp_path / "x.csv")]) != 0
    assert main(["simulate", "--out", str(tmp_path / "missing" / "dir" / "x.csv")]) != 0
    assert "error" in capsys.readouterr().err
    with pytest.raises(SystemExit):
        main(["simulate", "--mode", "nonsense"])


def _valid_svg(path):
    root = ET.parse(path).getroot()
    assert root.tag.endswith("svg")


def test_reproduce_figure2(tmp_path):
    assert main(["reproduce", "--figure", "2", "--out-dir", str(tmp_path)]) == 0
    rows = read_table(tmp_path / "figure2.csv")
    _valid_svg(tmp_path / "figure2.svg")
    h_free = [r for r in rows if r["state"] == "H" and r["bb"] == "0"]
    assert all(float(r["fidelity_raw"]) == pytest.approx(1.0, abs=1e-10) for r in h_free)
    for r in (r for r in rows if r["state"] == "D" and r["bb"] == "0"):
        n = int(r["n"])
        assert float(r["purity"]) == pytest.approx((1 + np.exp(-2 * n**2 * 0.0839**2)) / 2, abs=1e-6)


def test_reproduce_figure3(tmp_path):
    assert main(["reproduce", "--figure", "3", "--out-dir", str(tmp_path), "--n-max", "10", "--sphere-points", "64"]) == 0
    rows = read_table(tmp_path / "figure3.csv")
    _valid_svg(tmp_path / "figure3.svg")
    assert len({r["theta"] for r in rows}) == 5
    for r in rows:
        if r["n"] == "0":
            assert float(r["purity"]) == pytest.approx(1.0)


def _pipeline(tmp_path, name, *extra):
    out = tmp_path / name
    code = main(["pipeline", "--out-dir", str(out), "--n-max", "6", *extra])
    return code, out


def test_pipeline_outputs_and_determinism(tmp_path):
    code, a = _pipeline(tmp_path, "a", "--seed", "1")
    assert code == 0
    _, b = _pipeline(tmp_path, "b", "--seed", "1", "--workers", "2")
    names = sorted(p.name for p in a.iterdir())
    assert {"counts.csv", "counts.json", "states.json", "fit.json", "histogram_H.csv"} <= set(names)
    for name in names:
        assert (a / name).read_bytes() == (b / name).read_bytes(), name
    fit = json.loads((a / "fit.json").read_text())
    assert fit["config"]["seed"] == 1
    assert abs(fit["sigma_phi"] - 0.0839) < 0.005
    assert header(a / "counts.csv")["pipeline"]["seed"] == 1


def test_pipeline_config_file_and_overrides(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"schema_version": 1, "seed": 7, "n_max": 5, "restarts": 1}))
    out = tmp_path / "o"
    assert main(["pipeline", "--config", str(cfg), "--seed", "8", "--out-dir", str(out)]) == 0
    doc = json.loads((out / "fit.json").read_text())
    assert doc["config"]["seed"] == 8 and doc["config"]["n_max"] == 5


def test_pipeline_no_signal(tmp_path, capsys):
    code, _ = _pipeline(tmp_path, "z", "--counts", "0")
    assert code == 3
    assert "no signal" in capsys.readouterr().err


@pytest.mark.parametrize("doc", [{"schema_version": 2}, {"bogus": 1}, {"mode": "warp"}, [1, 2]])
def test_pipeline_schema_errors(tmp_path, doc, capsys):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps(doc))
    assert main(["pipeline", "--config", str(cfg), "--out-dir", str(tmp_path / "o")]) == 2
    assert capsys.readouterr().err.startswith("error")


def test_module_entry_point():
    import subprocess
    import sys

    res = subprocess.run([sys.executable, "-m", "bbqubit", "--help"], capture_output=True, text=True)
    assert res.returncode == 0 and "simulate" in res.stdout
