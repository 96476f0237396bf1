import csv
import json

import numpy as np
import pytest

from nullmem import archive, cli
from nullmem.bondi import BondiWaveform
from nullmem.sphere.fields import ScalarField
from nullmem.sphere.grid import SphereGrid


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def value(report, key):
    for line in report.splitlines():
        if line.startswith(key):
            return line[len(key):].strip()
    raise KeyError(key)


@pytest.fixture
def small(tmp_path, capsys):
    path = tmp_path / "p"
    code, _, _ = run(["synth", "-o", str(path), "--band-limit", "8", "--af-electric", "1,0,1",
                      "--no-timestamp"], capsys)
    assert code == 0
    return path


def test_massloss_zero_payload(tmp_path, capsys):
    path = tmp_path / "z"
    assert run(["synth", "-o", str(path), "--amplitude", "0", "--band-limit", "4"], capsys)[0] == 0
    csv_path = tmp_path / "m.csv"
    code, out, _ = run(["massloss", str(path), "--csv", str(csv_path), "--no-timestamp"], capsys)
    assert code == 0
    assert float(value(out, "radiated M(+inf) - M(-inf)")) == 0
    rows = list(csv.reader(open(csv_path)))
    assert rows[0] == ["u [geometric]", "M [geometric]", "dM/du [dimensionless]"]
    assert {float(r[1]) for r in rows[1:]} == {0.0}


def test_deterministic_reports(small, tmp_path, capsys):
    outs = []
    for i in range(2):
        csv_path = tmp_path / f"f{i}.csv"
        code, out, _ = run(["memory", str(small), "--no-timestamp", "--csv", str(csv_path)], capsys)
        assert code == 0
        outs.append((out, csv_path.read_bytes()))
    assert outs[0] == outs[1]
    code, out, _ = run(["flux", str(small)], capsys)
    assert out.splitlines()[1].startswith("generated ")


def test_memory_em_only(tmp_path, capsys):
    path = tmp_path / "em"
    run(["synth", "-o", str(path), "--xi-electric", "", "--af-electric", "2,0,1",
         "--band-limit", "8"], capsys)
    code, out, _ = run(["memory", str(path), "--source", "both", "--no-timestamp"], capsys)
    assert code == 0
    assert float(value(out, "constraint vs direct residual")) > 1e-3


def test_detector_closed_form(small, tmp_path, capsys):
    csv_path = tmp_path / "d.csv"
    code, out, _ = run(["detector", str(small), "--d0", "1", "--r", "1000",
                        "--direction", "1.0,0.5", "--closed-form", "--csv", str(csv_path),
                        "--no-timestamp"], capsys)
    assert code == 0
    assert float(value(out, "closed-form position mismatch")) < 1e-5
    header = next(csv.reader(open(csv_path)))
    assert header[0] == "t [geometric]" and "x1_(1)_closed [length]" in header


def test_radius(capsys):
    code, out, _ = run(["radius", "--mass", "1", "--no-timestamp"], capsys)
    assert code == 0
    assert float(value(out, "fitted log coefficient")) == pytest.approx(-2, abs=0.04)


def test_validate(small, capsys):
    code, out, _ = run(["validate", str(small), "--no-timestamp"], capsys)
    assert code == 0 and value(out, "overall") == "pass"


def test_bondi_check(tmp_path, capsys):
    grid = SphereGrid(4)
    rng = np.random.default_rng(1)
    w = np.linspace(-8, 8, 81)
    prof = np.exp(-w**2)[:, None, None]
    f = {k: ScalarField(grid, prof * rng.normal(size=grid.shape)) for k in "cdXY"}
    archive.save_bondi(BondiWaveform(w, **f), tmp_path / "b")
    code, out, _ = run(["bondi-check", str(tmp_path / "b"), "--orientation", "-1",
                        "--no-timestamp"], capsys)
    assert code == 0
    assert float(value(out, "pointwise integrand residual")) < 1e-10
    assert value(out, "dM/dw sign consistent") == "True"


@pytest.mark.parametrize("argv,category,code", [
    (["massloss", "/nonexistent/archive"], "archive", 9),
    (["synth", "-o", "/tmp/never", "--xi-electric", "40,0,1"], "spec", 10),
    (["radius", "--mass", "1", "--t-span", "oops"], "usage", 2),
    (["radius", "--mass", "1", "--r0", "1"], "domain", 6),
])
def test_error_contract(argv, category, code, capsys):
    rc, _, err = run(argv, capsys)
    assert rc == code
    msg = json.loads(err.strip().splitlines()[-1])
    assert msg["error"] == category and msg["field"]


def test_detector_range_error(small, capsys):
    rc, _, err = run(["detector", str(small), "--direction", "0.001,0"], capsys)
    assert rc == 5 and json.loads(err)["field"] == "direction"
