import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from freebound import geometry as geo
from freebound.io import (PROFILE_HEADER, ParseError, load_curve, load_mesh, load_support_points, make_report,
                          save_curve, save_off, save_profile_csv, save_report, to_jsonable)
from freebound.monotonicity import g_profile
from freebound.willmore import surface_data


@given(st.integers(6, 20), st.floats(0.3, 3.0))
def test_off_round_trip_is_exact(n, r):
    import tempfile, os
    m = geo.spherical_cap(r, n)
    with tempfile.TemporaryDirectory() as d:
        p = os.path.join(d, "m.off")
        save_off(m, p)
        back = load_mesh(p)
    assert np.array_equal(back.vertices, m.vertices)
    assert np.array_equal(back.faces, m.faces)


def test_obj_with_quads_and_negative_indices(tmp_path):
    p = tmp_path / "q.obj"
    p.write_text("v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nv 2 0 0\nf 1/1 2/2 3/3 4/4\nf -4 -1 -3\n")
    m = load_mesh(p)
    assert m.n_faces == 3
    assert m.area() == pytest.approx(1.5)


@pytest.mark.parametrize("text", [
    "", "OFF\n", "OFF\n3 1 0\n0 0 0\n1 0 0\n", "OFF\n3 1 0\n0 0 0\n1 0 0\n0 x 0\n3 0 1 2\n",
    "OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 7\n", "OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n2 0 1\n",
])
def test_malformed_off(tmp_path, text):
    p = tmp_path / "bad.off"
    p.write_text(text)
    with pytest.raises(ParseError):
        load_mesh(p)


def test_unknown_mesh_format(tmp_path):
    with pytest.raises(ParseError):
        load_mesh(tmp_path / "m.ply")


def test_curve_round_trip(tmp_path):
    c = geo.trefoil(40)
    save_curve(c, tmp_path / "c.json")
    back = load_curve(tmp_path / "c.json")
    assert np.array_equal(back.vertices, c.vertices)


@pytest.mark.parametrize("obj", [[1, 2], {"points": [[0, 0]]}, {"closed": False, "points": [[0, 0, 0]] * 4},
                                 {"pts": []}])
def test_malformed_curve(tmp_path, obj):
    p = tmp_path / "c.json"
    p.write_text(json.dumps(obj))
    with pytest.raises(ParseError):
        load_curve(p)


def test_invalid_json(tmp_path):
    p = tmp_path / "c.json"
    p.write_text("{not json")
    with pytest.raises(ParseError):
        load_curve(p)


def test_support_points(tmp_path):
    p = tmp_path / "s.json"
    p.write_text(json.dumps({"points": [[1, 0, 0], [0, 1, 0]], "normals": [[1, 0, 0], [0, 1, 0]]}))
    pts, nrm = load_support_points(p)
    assert pts.shape == nrm.shape == (2, 3)
    p.write_text(json.dumps({"points": [[1, 0, 0], [0, 1, 0]], "normals": [[1, 0, 0]]}))
    with pytest.raises(ParseError):
        load_support_points(p)


def test_profile_csv_columns(tmp_path):
    d = surface_data(geo.flat_disk(16))
    prof = g_profile(d, np.zeros(3), [0.2, 0.5, 1.5])
    save_report(prof, tmp_path / "p.csv")
    rows = (tmp_path / "p.csv").read_text().splitlines()
    assert rows[0].split(",") == PROFILE_HEADER
    vals = np.array([[float(x) for x in r.split(",")] for r in rows[1:]])
    assert np.allclose(vals[:, 3], vals[:, 1] + vals[:, 2])
    assert np.allclose(vals[:, 0], [0.2, 0.5, 1.5])


def test_report_schema_and_non_finite(tmp_path):
    rep = make_report({"mesh": "x"}, {"a": np.float64(np.inf), "b": np.arange(3)},
                      [{"name": "n", "pass": np.bool_(True), "measured": 1.0, "expected": 1.0, "tolerance": 0.1}],
                      timestamp="t")
    assert set(rep) == {"tool_version", "timestamp", "input", "results", "verdicts"}
    save_report(rep, tmp_path / "r.json")
    back = json.loads((tmp_path / "r.json").read_text())
    assert back["results"] == {"a": "inf", "b": [0, 1, 2]}
    assert back["verdicts"][0]["pass"] is True


def test_to_jsonable_nested():
    assert to_jsonable({1: (np.int64(2), [np.float32(0.5)])}) == {"1": [2, [0.5]]}
