from __future__ import annotations

import csv
import io
import json

import pytest

from neqsteady.cli import main
from neqsteady.figures import COLUMNS

CHAIN = """
[modes]
L = {w_l}
bus = 2.0
R = {w_r}

[couplings]
L-bus = {g_l}
bus-R = {g_r}

[baths]
L.temperature = 1.0
L.rate = 0.002
R.temperature = 3.0
R.rate = 0.003
"""

COLD = """
[modes]
L = 1.0
R = 1.0

[couplings]
L-R = 0.02

[baths]
L.temperature = 0.4
L.rate = 0.02
R.temperature = 0.8
R.rate = 0.03

[oracle]
cutoffs = 6, 6
"""


def write(tmp_path, text, name="run.ini"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def chain_config(tmp_path, w_l=1.0, w_r=1.0, g_l=0.08, g_r=0.08, extra=""):
    return write(tmp_path, CHAIN.format(w_l=w_l, w_r=w_r, g_l=g_l, g_r=g_r) + extra)


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_steady_json(tmp_path, capsys):
    code, out, _ = run(capsys, "steady", "--config", chain_config(tmp_path))
    assert code == 0
    doc = json.loads(out)
    assert doc["rwa"] is False
    assert doc["inputs"]["modes"] == {"L": 1.0, "bus": 2.0, "R": 1.0}
    report = doc["report"]
    t_l, t_r = report["effective_temperatures"][0], report["effective_temperatures"][2]
    assert 1.0 < t_l < t_r < 3.0
    # the undriven bus has no bath temperature of its own
    assert report["effective_temperatures"][1] is not None


def test_steady_sweep_csv(tmp_path, capsys):
    cfg = chain_config(tmp_path, extra="[sweep]\nparameter = delta\nfrom = -0.2\nto = 0.2\npoints = 5\n")
    code, out, _ = run(capsys, "steady", "--config", cfg, "--format", "csv")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["delta", "N_L", "Teff_L", "N_bus", "Teff_bus", "N_R", "Teff_R", "solve_residual"]
    assert [r[0] for r in rows[1:]] == ["-0.2", "-0.1", "0", "0.1", "0.2"]
    code, out2, _ = run(capsys, "steady", "--config", cfg, "--format", "csv", "--points", "3")
    assert len(out2.splitlines()) == 4


def test_steady_writes_file(tmp_path, capsys):
    target = tmp_path / "report.json"
    code, out, _ = run(capsys, "steady", "--config", chain_config(tmp_path), "--out", target)
    assert code == 0 and out == ""
    assert "report" in json.loads(target.read_text())


def test_exit_codes(tmp_path, capsys):
    code, _, err = run(capsys, "steady", "--config", chain_config(tmp_path, g_l=0.0, g_r=0.0))
    assert code == 2 and "undamped normal mode" in err
    code, _, err = run(capsys, "steady", "--config", tmp_path / "missing.ini")
    assert code == 3
    code, _, _ = run(capsys, "steady", "--config", write(tmp_path, "[modes]\nL = x\n", "bad.ini"))
    assert code == 3
    code, _, _ = run(capsys, "fig2", "--points", "1")
    assert code == 3
    code, _, _ = run(capsys, "fig2", "--jobs", "0")
    assert code == 3
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 3
    capsys.readouterr()


def fig2_csv(capsys, *extra):
    code, out, _ = run(capsys, "fig2", "--points", "5", "--from", "-0.2", "--to", "0.2", *extra)
    assert code == 0
    return out


def test_fig2_is_deterministic_across_jobs(capsys, monkeypatch):
    serial = fig2_csv(capsys)
    assert fig2_csv(capsys, "--jobs", "3") == serial
    monkeypatch.setenv("NEQSTEADY_JOBS", "2")
    assert fig2_csv(capsys) == serial
    rows = list(csv.reader(io.StringIO(serial)))
    assert tuple(rows[0]) == COLUMNS
    assert len(rows) == 1 + 4 * 5
    # grouped by g, then ascending delta
    assert [r[1] for r in rows[1:6]] == ["0.02"] * 5
    assert [float(r[0]) for r in rows[1:6]] == sorted(float(r[0]) for r in rows[1:6])


def test_fig2_rows_match_steady(tmp_path, capsys):
    code, out, _ = run(capsys, "fig2", "--panel", "b", "--points", "3", "--from", "-0.1", "--to", "0.1", "--format", "json")
    assert code == 0
    rows = json.loads(out)["rows"]
    for row in rows[3:6]:
        cfg = chain_config(tmp_path, w_l=1 + row["delta"] / 2, w_r=1 - row["delta"] / 2, g_l=row["g"], g_r=0.8 * row["g"])
        code, out, _ = run(capsys, "steady", "--config", cfg)
        report = json.loads(out)["report"]
        assert report["effective_temperatures"][0] == pytest.approx(row["Teff_L"], abs=1e-12)
        assert report["effective_temperatures"][2] == pytest.approx(row["Teff_R"], abs=1e-12)
        assert report["local_occupations"][0] == pytest.approx(row["N_L"], abs=1e-12)


def test_fig2_panel_c_degenerate_equality(capsys):
    out = fig2_csv(capsys, "--panel", "c", "--format", "json")
    rows = [r for r in json.loads(out)["rows"] if r["delta"] == 0]
    assert len(rows) == 4
    for r in rows:
        assert abs(r["Teff_L"] - r["Teff_R"]) <= 1e-9


def test_fig2_plot(tmp_path, capsys):
    target = tmp_path / "fig2.png"
    fig2_csv(capsys, "--plot", target, "--out", tmp_path / "fig2.csv")
    assert target.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
    assert (tmp_path / "fig2.csv").read_text().startswith("delta,g,")


def test_reduce(tmp_path, capsys):
    code, out, _ = run(capsys, "reduce", "--config", chain_config(tmp_path))
    assert code == 0
    doc = json.loads(out)
    assert doc["reduced"]["omega_left"] == pytest.approx(0.9936, abs=1e-14)
    assert doc["reduced"]["coupling"] == pytest.approx(-0.0064, abs=1e-14)
    assert max(abs(x) for x in doc["difference"]["closed_minus_two_mode"]) < 1e-10
    assert doc["warnings"] == []
    code, out, _ = run(capsys, "reduce", "--config", chain_config(tmp_path, w_l=1.7))
    assert code == 0 and json.loads(out)["warnings"]


def test_oracle_check(tmp_path, capsys):
    code, out, _ = run(capsys, "oracle-check", "--config", write(tmp_path, COLD))
    assert code == 0
    doc = json.loads(out)
    assert doc["passed"] is True
    assert doc["oracle"]["cutoffs"] == [6, 6]
    for mode in doc["modes"]:
        assert mode["abs_error"] <= 1e-3


def test_oracle_check_not_converged(tmp_path, capsys):
    code, _, err = run(capsys, "oracle-check", "--config", write(tmp_path, COLD + "t_final = 5\n"))
    assert code == 4 and "did not converge" in err
