import json
import subprocess
import sys

import numpy as np
import pytest

from freebound import geometry as geo
from freebound.cli import main, parse_radii
from freebound.io import save_curve, save_off


def run(tmp_path, monkeypatch, *argv):
    monkeypatch.chdir(tmp_path)
    return main([str(a) for a in argv])


def test_generate_disk(tmp_path, monkeypatch, capsys):
    assert run(tmp_path, monkeypatch, "generate", "--kind", "flat-disk", "--resolution", 64, "-o", "disk.off") == 0
    assert (tmp_path / "disk.off").read_text().startswith("OFF")


def test_generate_cap_logs_analytic_area(tmp_path, monkeypatch, capsys):
    assert run(tmp_path, monkeypatch, "generate", "--kind", "spherical-cap", "--r", 1.0, "--resolution", 96,
               "-o", "cap.off") == 0
    assert "analytic area 1.84030" in capsys.readouterr().out


def test_generate_bad_resolution(tmp_path, monkeypatch, capsys):
    assert run(tmp_path, monkeypatch, "generate", "--kind", "circle", "--resolution", 0) == 2
    assert "resolution" in capsys.readouterr().err


def test_generate_from_config(tmp_path, monkeypatch):
    (tmp_path / "g.cfg").write_text("kind = ellipse\nresolution = 40\na = 3\noutput = e.json\n")
    assert run(tmp_path, monkeypatch, "generate", "--config", "g.cfg", "--resolution", 48) == 0
    pts = json.loads((tmp_path / "e.json").read_text())["points"]
    assert len(pts) == 48
    assert max(p[0] for p in pts) == pytest.approx(3.0)


def test_analyze_disk(tmp_path, monkeypatch):
    save_off(geo.flat_disk(32), tmp_path / "d.off")
    code = run(tmp_path, monkeypatch, "analyze-surface", "d.off", "--center", "0,0,0", "--center", "1,0,0",
               "--radii", "0.1:2.5:12", "--profile-dir", "prof", "-o", "r.json")
    assert code == 0
    rep = json.loads((tmp_path / "r.json").read_text())
    assert set(rep) == {"tool_version", "timestamp", "input", "results", "verdicts"}
    assert rep["results"]["willmore_energy"] == pytest.approx(2 * np.pi, rel=0.01)
    assert all({"name", "pass", "measured", "expected", "tolerance"} <= set(v) for v in rep["verdicts"])
    assert (tmp_path / "prof" / "profile_1.csv").exists()


def test_analyze_is_reproducible(tmp_path, monkeypatch):
    save_off(geo.perturbed_cap(1.0, 24, 0.05, 2), tmp_path / "p.off")
    outs = []
    for k in range(2):
        assert run(tmp_path, monkeypatch, "analyze-surface", "p.off", "--reproducible", "--radii", "0.2,0.5,1",
                   "-o", f"r{k}.json") == 0
        rep = json.loads((tmp_path / f"r{k}.json").read_text())
        rep.pop("timestamp")
        outs.append(json.dumps(rep, sort_keys=True))
    assert outs[0] == outs[1]


def test_analyze_inadmissible(tmp_path, monkeypatch, capsys):
    save_off(geo.flat_disk(16).transformed(scale=0.9), tmp_path / "s.off")
    assert run(tmp_path, monkeypatch, "analyze-surface", "s.off") == 3
    assert "max_boundary_radius_defect" in capsys.readouterr().err


@pytest.mark.parametrize("args", [("missing.off",), ("d.off", "--radii", "2:1:5"), ("d.off", "--center", "1,2")])
def test_analyze_input_errors(tmp_path, monkeypatch, args):
    save_off(geo.flat_disk(16), tmp_path / "d.off")
    assert run(tmp_path, monkeypatch, "analyze-surface", *args) == 2


def test_curve_energy_circle(tmp_path, monkeypatch):
    save_curve(geo.circle(512), tmp_path / "c.json")
    assert run(tmp_path, monkeypatch, "curve-energy", "c.json", "--p", "1.5,2,3,4", "-o", "r.json") == 0
    rep = json.loads((tmp_path / "r.json").read_text())
    assert rep["results"]["curve_energy"]["e1"] == pytest.approx(4 * np.pi ** 2, abs=0.05)
    assert all(v["equality"] for v in rep["verdicts"][:1])


def test_curve_energy_errors(tmp_path, monkeypatch):
    (tmp_path / "bad.json").write_text('{"points": [[0, 0]]}')
    assert run(tmp_path, monkeypatch, "curve-energy", "bad.json") == 2
    save_curve(geo.circle(32), tmp_path / "c.json")
    assert run(tmp_path, monkeypatch, "curve-energy", "c.json", "--p", "1") == 2


def test_optimize_circle_and_trace(tmp_path, monkeypatch):
    save_curve(geo.circle(64), tmp_path / "c.json")
    assert run(tmp_path, monkeypatch, "optimize", "c.json", "--trace", "t.csv", "-o", "f.json") == 0
    assert (tmp_path / "t.csv").read_text().splitlines()[0] == "iter,objective,grad_norm,length"
    assert json.loads((tmp_path / "f.json").read_text())["closed"] is True


def test_optimize_config_p_one(tmp_path, monkeypatch, capsys):
    save_curve(geo.circle(64), tmp_path / "c.json")
    (tmp_path / "o.cfg").write_text("p = 1\n")
    assert run(tmp_path, monkeypatch, "optimize", "c.json", "--config", "o.cfg") == 2
    assert "p must" in capsys.readouterr().err


def test_optimize_line_search_failure_exit_code(tmp_path, monkeypatch):
    save_curve(geo.perturbed_circle(32, 0.2, 3), tmp_path / "c.json")
    # a huge first step with a single backtrack can never pass the Armijo test
    (tmp_path / "o.cfg").write_text("max_backtracks = 1\ninitial_step = 1e6\n")
    assert run(tmp_path, monkeypatch, "optimize", "c.json", "--config", "o.cfg") == 4


def test_verify_unknown_suite(capsys):
    assert main(["verify", "nightly"]) == 2


def test_verify_single_quick_criterion(capsys):
    assert main(["verify", "quick", "--only", "11"]) == 0
    assert "[PASS] C11" in capsys.readouterr().out


def test_parse_radii():
    assert np.allclose(parse_radii("0.1,0.2"), [0.1, 0.2])
    assert len(parse_radii("0.1:1:5")) == 5


def test_module_entry_point(tmp_path):
    out = subprocess.run([sys.executable, "-m", "freebound", "generate", "--kind", "trefoil", "--resolution", "16",
                          "-o", str(tmp_path / "t.json")], capture_output=True, text=True)
    assert out.returncode == 0, out.stderr


def test_analyze_with_ellipsoid_support(tmp_path, monkeypatch):
    assert run(tmp_path, monkeypatch, "generate", "--kind", "elliptic-disk", "--a", 2, "--b", 1,
               "--resolution", 32, "-o", "e.off") == 0
    assert run(tmp_path, monkeypatch, "analyze-surface", "e.off", "--support", "ellipsoid", "--support-axes",
               "2,1,1", "--radii", "0.2,0.6", "-o", "r.json") == 0
    sup = json.loads((tmp_path / "r.json").read_text())["results"]["support_inequality"]
    assert sup["margin"] > 0
    # the same disk is not free boundary for the unit sphere
    assert run(tmp_path, monkeypatch, "analyze-surface", "e.off") == 3
