import csv
import io
import json
from importlib import resources

import jsonschema
import pytest

from spinberry import cli
from spinberry.report import CSV_COLUMNS

SCHEMA = json.loads(resources.files("spinberry").joinpath("schemas/report.schema.json").read_text())


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def records(text):
    return {r["name"]: r for r in json.loads(text)["records"]}


def test_spin_expectation_default(capsys):
    code, out, _ = run(capsys, "spin-expectation", "--quiet", "--set", "points=[[0,0,1]]")
    assert code == 0
    doc = json.loads(out)
    jsonschema.validate(doc, SCHEMA)
    rec = records(out)["point[0].relative_error"]
    assert rec["verdict"] == "PASS" and rec["value"] < 1e-8
    assert all(r["config_hash"] == doc["config_hash"] for r in doc["records"])


def test_spin_expectation_coarse_quadrature_rechecked(capsys):
    code, out, _ = run(capsys, "spin-expectation", "--quiet", "--set", "quadrature.n_r=32", "--set", "quadrature.n_theta=16")
    assert code == 0
    rec = records(out)
    assert rec["point[0].relative_error"]["resolution"] == "n_r=32,n_theta=16,n_phi=32"
    assert rec["point[0].relative_error"]["verdict"] == "PASS"


def test_zero_spin_vector_is_validation_error(capsys):
    code, out, err = run(capsys, "spin-expectation", "--set", "points=[[0,0,0]]")
    assert code == 1
    assert "zero spin vector" in err
    assert out == ""


def test_pole_contour_rejected(capsys):
    code, _, err = run(capsys, "connection", "--set", "points=[[0,0,2]]")
    assert code == 1
    assert "s_z axis" in err


def test_phase_circle(capsys):
    code, out, _ = run(capsys, "phase", "--quiet", "--set", "mesh.n_rings=10")
    assert code == 0
    doc = json.loads(out)
    jsonschema.validate(doc, SCHEMA)
    rec = records(out)
    assert rec["solid_angle"]["value"] == pytest.approx(3.14159, abs=1e-5)
    assert rec["gamma_discrete"]["value"] == pytest.approx(-1.5708, abs=1e-4)
    assert rec["gamma_line.paper"]["value"] == pytest.approx(3.14159, abs=1e-4)
    assert rec["gamma_stokes.spinor_analytic"]["value"] == pytest.approx(-1.5708, abs=1e-4)
    assert "residual.discrete-line:fd.mod_2pi" in rec


def test_phase_reversed_orientation(capsys):
    base = "--set", "mesh.n_rings=4", "--set", "contour.n=400"
    _, fwd, _ = run(capsys, "phase", "--quiet", *base)
    _, rev, _ = run(capsys, "phase", "--quiet", *base, "--set", "contour.clockwise=true")
    fwd, rev = records(fwd), records(rev)
    for name in ("solid_angle", "gamma_discrete", "gamma_line.paper", "gamma_line.fd", "gamma_stokes.paper"):
        assert rev[name]["value"] == pytest.approx(-fwd[name]["value"], abs=1e-9)


def test_phase_octant_polygon(capsys):
    contour = '{"shape": "polygon", "vertices": [[1,0,0],[0,1,0],[0,0,1]], "points_per_edge": 50}'
    code, out, _ = run(capsys, "phase", "--quiet", "--set", f"contour={contour}", "--set", "mesh.n_rings=5")
    assert code == 0
    rec = records(out)
    assert rec["solid_angle"]["value"] == pytest.approx(1.5707963, abs=1e-6)
    assert "unavailable.line:spinor_analytic" in rec


def test_adiabatic_sweep_and_warning(capsys):
    code, out, _ = run(capsys, "adiabatic", "--quiet", "--set", "adiabatic.steps=20000")
    assert code == 0
    rec = records(out)
    errs = [abs(rec[f"T={t!r}.error"]["value"]) for t in (50.0, 100.0, 200.0, 500.0)]
    assert all(b < a for a, b in zip(errs, errs[1:]))
    assert rec["fitted_exponent"]["value"] == pytest.approx(-1, abs=0.2)
    _, out, _ = run(capsys, "adiabatic", "--quiet", "--set", "adiabatic.steps=200", "--set", "adiabatic.durations=[500]")
    assert "resolution" in records(out)["T=500.0.reliable"]["note"]


def test_adiabatic_constant_field(capsys):
    code, out, _ = run(capsys, "adiabatic", "--quiet", "--set", "adiabatic.field=constant", "--set", "adiabatic.steps=1000")
    assert code == 0
    assert records(out)["T=500.0.geometric_phase"]["value"] == pytest.approx(0, abs=1e-10)


def test_curvature_command(capsys):
    code, out, _ = run(capsys, "curvature", "--quiet", "--set", "sphere.n_theta=32", "--set", "sphere.n_phi=64")
    assert code == 0
    rec = records(out)
    assert rec["sphere.chern_number"]["value"] == pytest.approx(-1, abs=1e-6)
    assert rec["sphere.flux.paper"]["value"] == pytest.approx(-12.566370614, abs=1e-8)
    assert rec["point[0].magnitude_ratio_to_paper"]["value"] == pytest.approx(0.5, abs=1e-6)


def test_connection_command_csv(capsys):
    code, out, _ = run(capsys, "connection", "--quiet", "--format", "csv")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert tuple(rows[0]) == CSV_COLUMNS
    ratio = [r for r in rows if r[2] == "point[0].magnitude_ratio_to_paper"][0]
    assert float(ratio[3]) == pytest.approx(0.5, abs=1e-6)


def test_output_file_and_determinism(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    args = ("phase", "--quiet", "--set", "mesh.n_rings=4", "--set", "contour.n=300")
    assert run(capsys, *args, "--output", str(a))[0] == 0
    assert run(capsys, *args, "--output", str(b))[0] == 0
    assert a.read_bytes() == b.read_bytes()
    assert "timestamp" not in json.loads(a.read_text())


def test_timestamp_optional(capsys):
    _, out, _ = run(capsys, "spin-expectation", "--quiet", "--set", "output.timestamp=true")
    assert "timestamp" in json.loads(out)


def test_config_file(tmp_path, capsys):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"format": "spinberry-config/1", "points": [[0.0, 1.0, 0.0]]}))
    code, out, _ = run(capsys, "spin-expectation", "--quiet", "--config", str(path))
    assert code == 0
    assert records(out)["point[0].spin_expectation.y"]["value"] == pytest.approx(1.0)


def test_verify_all_coarse_fails(capsys):
    code, out, err = run(capsys, "verify-all", "--resolution-scale", "0.05", "--seed", "3")
    assert code == 2
    doc = json.loads(out)
    jsonschema.validate(doc, SCHEMA)
    status = {k: v["status"] for k, v in doc["summary"].items()}
    assert status["7"] == status["8"] == "FAIL"
    assert status["10"] == "PASS"
    assert "[FAIL]  7 solid angle" in err
