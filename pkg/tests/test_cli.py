import csv
import io
import json
import shutil
from pathlib import Path

import pytest

from stretchlab.cli import main
from stretchlab.meshes import octahedron, torus
from stretchlab.serialize import write_mesh

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


@pytest.fixture
def octa_off(tmp_path):
    p = tmp_path / "octa.off"
    write_mesh(octahedron(), p)
    return p


@pytest.fixture
def thin_config(tmp_path):
    p = tmp_path / "thin.toml"
    p.write_text('[geometry]\nkind = "coarse_dumbbell"\n\n[surgery]\nR_list = ["ell", 4.0]\n\n'
                 '[output]\ncsv = "out.csv"\njson = "out.json"\n')
    return p


def test_solve_certified(capsys, octa_off, tmp_path):
    code, out, _ = run(capsys, "solve", "--mesh", str(octa_off), "--volume", "0.866",
                       "--volume", "1.732", "--certify", "--regions", str(tmp_path / "r.json"))
    assert code == 0
    table = rows(out)
    assert [r["certified"] for r in table] == ["true", "true"]
    assert float(table[1]["perimeter"]) == pytest.approx(4.0)
    regions = json.loads((tmp_path / "r.json").read_text())
    assert len(regions) == 2 and len(regions[1]) == 4


def test_solve_lambda_grid(capsys, octa_off):
    code, out, _ = run(capsys, "solve", "--mesh", str(octa_off), "--lambda-grid=-1,0.5,3",
                       "--anchors", "global")
    assert code == 0
    vols = [float(r["volume"]) for r in rows(out)]
    assert vols == sorted(vols)


def test_solve_certify_fails_when_uncertified(capsys, tmp_path):
    p = tmp_path / "t.json"
    write_mesh(torus(3, 4), p)
    code, out, _ = run(capsys, "solve", "--mesh", str(p), "--volume", "12.0",
                       "--anchors", "extremal", "--certify")
    assert code in (0, 1)
    assert (code == 0) == all(r["certified"] == "true" for r in rows(out))


def test_bad_mesh_exit_code(capsys, tmp_path):
    p = tmp_path / "bad.off"
    p.write_text("OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n")
    code, _, err = run(capsys, "solve", "--mesh", str(p), "--volume", "0.1")
    assert code == 2 and "error" in err


def test_sweep_writes_configured_files(capsys, thin_config):
    code, _, _ = run(capsys, "sweep", "--config", str(thin_config))
    assert code == 0
    out = thin_config.parent
    first = (out / "out.csv").read_bytes(), (out / "out.json").read_bytes()
    assert run(capsys, "sweep", "--config", str(thin_config))[0] == 0
    assert ((out / "out.csv").read_bytes(), (out / "out.json").read_bytes()) == first
    summary = json.loads(first[1])
    assert summary["summary"]["R_star"] is not None


def test_vcm(capsys, tmp_path):
    cfg = tmp_path / "vcm.toml"
    shutil.copy(CONFIGS / "coarse_vcm.toml", cfg)
    code, _, _ = run(capsys, "vcm", "--config", str(cfg), "--csv", str(tmp_path / "v.csv"),
                     "--json", str(tmp_path / "v.json"))
    assert code == 0
    assert all(r["boundary_is_target"] == "true" for r in rows((tmp_path / "v.csv").read_text()))


def test_surgery_export(capsys, thin_config, tmp_path):
    code, out, _ = run(capsys, "surgery", "--config", str(thin_config),
                       "--export", str(tmp_path / "meshes"))
    assert code == 0
    table = rows(out)
    assert len({r["perimeter_omega"] for r in table}) == 1
    assert len({r["volume_outside"] for r in table}) == 1
    files = sorted((tmp_path / "meshes").glob("*.json"))
    assert len(files) == 2
    prov = json.loads(files[1].read_text())["provenance"]
    assert prov["R"] == 4.0 and {"epsilon", "ell", "eta_spec"} <= set(prov)


def test_cones_table(capsys):
    code, out, _ = run(capsys, "cones", "--max-sum", "12")
    assert code == 0
    table = rows(out)
    assert len(table) == sum(s // 2 for s in range(2, 13))
    (row,) = [r for r in table if r["p"] == "3" and r["q"] == "3"]
    assert row["class"] == "strictly stable" and float(row["mu1"]) == -6.0


def test_cones_spec(capsys, tmp_path):
    p = tmp_path / "c.json"
    p.write_text(json.dumps([{"p": 1, "q": 1}, {"p": 2, "q": 6}]))
    code, out, _ = run(capsys, "cones", "--spec", str(p))
    assert code == 0
    assert [r["class"] for r in rows(out)] == ["unstable", "strictly stable"]


def test_conformal_check(capsys):
    code, out, _ = run(capsys, "conformal-check")
    assert code == 0
    assert len(rows(out)) == 9


def test_conformal_check_fails_on_tight_tolerance(capsys):
    code, _, _ = run(capsys, "conformal-check", "--tol", "1e-12")
    assert code == 1


@pytest.mark.parametrize("argv", [
    ("cones", "--max-sum", "10"),
    ("conformal-check",),
])
def test_stdout_is_deterministic(capsys, argv):
    a = run(capsys, *argv)
    b = run(capsys, *argv)
    assert a == b
