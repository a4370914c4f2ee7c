import json

import jsonschema
import numpy as np
import pytest

from proxot import io
from proxot.measures import DiscreteMeasure
from proxot.prox_solver import SolverConfig, solve_proximal
from proxot.report import SCHEMA_VERSION, RunReport, load_schema, sha256_file


def write(tmp_path, text, name="s.csv"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_read_uniform_and_weighted(tmp_path):
    P = io.read_samples(write(tmp_path, "x\n0\n1\n\n2\n"))
    np.testing.assert_array_equal(P.points[:, 0], [0, 1, 2])
    np.testing.assert_allclose(P.weights, 1 / 3)
    P = io.read_samples(write(tmp_path, "x0,x1,weight\n0,0,0.25\n1,2,0.75\n"))
    assert P.dim == 2
    np.testing.assert_array_equal(P.weights, [0.25, 0.75])


def test_read_renormalizes_round_off(tmp_path):
    P = io.read_samples(write(tmp_path, "x,weight\n0,0.5\n1,0.5000000001\n"))
    assert abs(P.weights.sum() - 1) <= 1e-12


@pytest.mark.parametrize("text, message", [
    ("", "header row is required"),
    ("0,1\n2,3\n", "header row required"),
    ("x,y\n0,1\n2\n", ":3: expected 2 columns"),
    ("x\n0\nabc\n", ":3: not a number"),
    ("x\n0\nnan\n", ":3: non-finite"),
    ("x,weight\n0,1.5\n1,-0.5\n", ":3: negative weight"),
    ("x,weight\n0,0.5\n1,0.6\n", "sum to"),
    ("x\n", "no data rows"),
])
def test_read_errors(tmp_path, text, message):
    with pytest.raises(io.InputError, match=message):
        io.read_samples(write(tmp_path, text))


def test_missing_file(tmp_path):
    with pytest.raises(io.InputError, match="cannot open"):
        io.read_samples(tmp_path / "nope.csv")


def test_samples_round_trip(tmp_path, rng):
    P = DiscreteMeasure.from_unnormalized(rng.standard_normal((7, 3)), rng.random(7) + 0.1)
    path = tmp_path / "p.csv"
    io.write_samples(path, P)
    Q = io.read_samples(path)
    np.testing.assert_array_equal(Q.points, P.points)
    np.testing.assert_allclose(Q.weights, P.weights, rtol=0, atol=1e-15)
    assert path.read_text().splitlines()[0] == "x0,x1,x2,weight"


def test_trajectory_and_series_layout(tmp_path):
    snaps = ((0, np.array([[0.0], [1.0]])), (5, np.array([[0.5], [1.5]])))
    io.write_trajectory(tmp_path / "t.csv", snaps)
    header, rows = io.read_table(tmp_path / "t.csv")
    assert header == ["step", "particle_id", "x"]
    assert rows.shape == (4, 3) and rows[2].tolist() == [5.0, 0.0, 0.5]


def test_fixtures_load(fixtures_dir):
    P = io.read_samples(fixtures_dir / "gaussian_grid_p.csv")
    assert P.n == 400
    src = io.read_samples(fixtures_dir / "flow_source.csv")
    assert src.n == 200 and src.dim == 1


def make_report():
    a = np.array([0.5, 0.5])
    b = np.array([0.25, 0.75])
    C = np.array([[0.0, 1.0], [1.0, 0.0]])
    cfg = SolverConfig()
    sol = solve_proximal(a, b, C, 0.5, cfg)
    return RunReport.from_solution(sol, ["proxot", "divergence"], {"p_samples": "0" * 64}, 1.5, cfg, {"k": 1})


def test_report_validates_against_schema():
    report = make_report()
    data = json.loads(report.to_json())
    jsonschema.validate(data, load_schema())
    assert data["schema_version"] == SCHEMA_VERSION
    assert set(data) == set(load_schema()["required"])


def test_report_round_trip(tmp_path):
    report = make_report()
    path = tmp_path / "r.json"
    report.write(path)
    back = RunReport.from_json(path.read_text())
    assert back.to_dict() == report.to_dict()


def test_schema_rejects_bad_report():
    data = json.loads(make_report().to_json())
    data["surprise"] = 1
    with pytest.raises(jsonschema.ValidationError):
        jsonschema.validate(data, load_schema())
    data = json.loads(make_report().to_json())
    data["input_digests"] = {"p_samples": "xyz"}
    with pytest.raises(jsonschema.ValidationError):
        jsonschema.validate(data, load_schema())


def test_sha256(tmp_path):
    p = write(tmp_path, "abc")
    assert sha256_file(p) == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
