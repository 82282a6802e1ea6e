import json
import subprocess
import sys

import pytest

from rfkit.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_popsicle_json(capsys):
    code, out, _ = run(capsys, "--format", "json", "popsicle", "--k", "3")
    rep = json.loads(out)
    assert code == 0 and rep["status"] == "PASS"
    assert rep["schema_version"] == 1 and rep["command"] == "popsicle"
    assert len(rep["rows"]) == 2


def test_ginzburg_csv(capsys):
    code, out, _ = run(capsys, "--format", "csv", "ginzburg", "--preset", "a2")
    assert code == 0
    assert "# condition 3: PASS" in out


def test_table_output(capsys):
    code, out, _ = run(capsys, "reeb")
    assert code == 0 and "PASS" in out


def test_malformed_toml(tmp_path, capsys):
    bad = tmp_path / "q.toml"
    bad.write_text("vertices = [\"1\",\narrows = 3\n")
    code, _, err = run(capsys, "ginzburg", "--quiver", str(bad))
    assert code == 2
    assert "error [ginzburg]" in err and "line" in err


def test_missing_profile_key(tmp_path, capsys):
    bad = tmp_path / "p.toml"
    bad.write_text("[profile]\nbreakpoints = [\"1\", \"2\"]\n")
    code, _, err = run(capsys, "reeb", "--profile", str(bad))
    assert code == 2 and "coefficients" in err


@pytest.mark.parametrize("field", ["fp:4", "fp:x", "r"])
def test_bad_field(field, capsys):
    code, _, _ = run(capsys, "--field", field, "popsicle", "--k", "3")
    assert code == 2


def test_failed_check_exits_one(capsys):
    code, out, _ = run(capsys, "--format", "json", "pairing", "--scale", "1=2,2=3")
    assert code == 1 and json.loads(out)["status"] == "FAIL"


def test_finite_field_run(capsys):
    code, out, _ = run(capsys, "--field", "fp:5", "--format", "json", "limits")
    assert code == 0 and json.loads(out)["config"]["field"] == "F5"


def test_out_dir_writes_report_and_figure(tmp_path, capsys):
    code, _, _ = run(capsys, "--out", str(tmp_path), "--format", "json", "ginzburg",
                     "--preset", "a2")
    assert code == 0
    rep = json.loads((tmp_path / "ginzburg.json").read_text())
    assert rep["status"] == "PASS"
    png = (tmp_path / "ginzburg_hom.png").read_bytes()
    assert png.startswith(b"\x89PNG")


def test_figures_are_byte_identical(tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert run(capsys, "--out", str(d), "reeb")[0] == 0
    assert (a / "reeb_action.png").read_bytes() == (b / "reeb_action.png").read_bytes()


def test_json_deterministic(capsys):
    argv = ["--format", "json", "--seed", "3", "limits"]
    assert run(capsys, *argv)[1] == run(capsys, *argv)[1]


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "rfkit", "--format", "json", "popsicle", "--k", "2"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and json.loads(r.stdout)["status"] == "PASS"
