import json
import subprocess
import sys
from fractions import Fraction

import pytest

from olines.cli import dumps, main
from olines.configgen import load, planted_lines, save, serialize


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--format", "json")
    return code, json.loads(out)


@pytest.mark.parametrize("fixture, text", [
    ("hesse.cfg", "t2=0 t3=12"),
    ("triangle.cfg", "t2=3"),
    ("fermat4.cfg", "t2=0 t3=16 t4=3"),
    ("fermat-apex3.cfg", "t2=9 t3=12"),
    ("random24.cfg", "t2=276"),
])
def test_stats(capsys, fixture, text):
    code, out, _ = run(capsys, "stats", fixture)
    assert code == 0 and out.strip() == text


def test_stats_json_manifest(capsys):
    code, rep = run_json(capsys, "stats", "hesse.cfg")
    assert rep["t_profile"] == {"2": 0, "3": 12} and rep["n"] == 9
    man = rep["manifest"]
    assert man["command"] == "stats" and man["inputs"] == {"config": "hesse.cfg"}
    assert man["arithmetic"] == rep["field"]


@pytest.mark.parametrize("argv, code", [
    (["verify", "kelly", "hesse-apex.cfg"], 0),
    (["verify", "kelly", "fermat-apex3.cfg"], 0),
    (["verify", "melchior", "hesse.cfg"], 2),
    (["verify", "3n2", "random24.cfg"], 0),
    (["verify", "hirzebruch", "hesse.cfg"], 0),
    (["verify", "dichotomy", "fermat-apex3.cfg", "--b-star", "3"], 0),
    (["verify", "dichotomy", "hesse.cfg", "--b-star", "3", "--budget-cols", "4"], 4),
    (["verify", "removal", "fermat4.cfg", "--point", "0"], 0),
    (["verify", "nonsense", "hesse.cfg"], 3),
    (["verify", "removal", "hesse.cfg"], 3),
    (["verify", "kelly", "missing.cfg"], 3),
    (["bogus"], 3),
    (["stats"], 3),
])
def test_exit_codes(capsys, argv, code):
    assert run(capsys, *argv)[0] == code


def test_genuine_fail_exit(capsys, tmp_path):
    path = tmp_path / "planted.cfg"
    save(planted_lines(seed=0), path)
    code, rep = run_json(capsys, "verify", "main", str(path), "--c-min", "100")
    assert code == 1 and rep["verdict"] == "fail" and rep["details"]["fitted_c"] == "9/2"
    code, rep = run_json(capsys, "verify", "main", str(path))
    assert code == 0


def test_verify_json(capsys):
    code, rep = run_json(capsys, "verify", "hirzebruch", "hesse.cfg")
    assert rep["verdict"] == "pass" and (rep["margin_num"], rep["margin_den"]) == (0, 1)
    assert rep["claimed"] == "9" and rep["manifest"]["inputs"]["statement"] == "hirzebruch"


def test_parse_error_position(capsys, tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("dim 2\n1//2, 3\n")
    code, _, err = run(capsys, "stats", str(bad))
    assert code == 3 and "line 2, column 3" in err


def test_json_is_deterministic(capsys):
    a = run(capsys, "verify", "dichotomy", "fermat-apex3.cfg", "--b-star", "3", "--format", "json")[1]
    b = run(capsys, "verify", "dichotomy", "fermat-apex3.cfg", "--b-star", "3", "--format", "json")[1]
    assert a == b
    assert dumps({"b": 0.1, "a": [Fraction(1, 3)]}) == dumps({"a": [Fraction(1, 3)], "b": 0.1})
    assert "0.10000000000000001" in dumps({"x": 0.1})


def test_gen(capsys, tmp_path):
    out = tmp_path / "f.cfg"
    code, text, _ = run(capsys, "gen", "fermat", "--k", "4", "--out", str(out))
    assert code == 0 and text.strip() == "n=12 d=2"
    assert load(out).n == 12
    a = run(capsys, "gen", "random", "--n", "10", "--d", "3", "--seed", "5")[1]
    b = run(capsys, "gen", "random", "--n", "10", "--d", "3", "--seed", "5")[1]
    assert a == b and a.startswith("dim 3")
    assert run(capsys, "gen", "fermat", "--k", "1")[0] == 3


def test_depmat_and_scale(capsys, tmp_path):
    mat = tmp_path / "hesse.mat"
    code, rep = run_json(capsys, "depmat", "hesse.cfg", "--out", str(mat))
    assert code == 0 and rep["m"] == rep["expected_m"] == 72 and rep["annihilates"]
    assert rep["manifest"]["outputs"] == [str(mat)]
    code, rep = run_json(capsys, "scale", str(mat))
    assert code == 0 and rep["scaling"]["converged"]
    assert rep["scaling"]["min_col_sum"] >= 8 - 1e-6
    assert rep["rank_exact"] == rep["rank_snapped"] == 6
    assert 0 < rep["gram"]["rank_bound"] <= 6


def test_depmat_v2(capsys):
    code, rep = run_json(capsys, "depmat", "fermat4.cfg", "--construction", "v2")
    assert code == 0 and rep["m"] == 132 and not rep["shortfall"]
    assert Fraction(rep["certified_fraction"]) >= Fraction(1, 3)


def test_scale_nonconvergence(capsys, tmp_path):
    mat = tmp_path / "bad.mat"
    mat.write_text("2 4\n0 1 2  1  1  -2\n0 1 2  1  -2  1\n")
    code, rep = run_json(capsys, "scale", str(mat))
    assert code == 4 and rep["converged"] is False


def test_latin(capsys):
    code, out, _ = run(capsys, "latin", "6")
    assert code == 0 and out.splitlines()[0].split() == ["1", "4", "5", "3", "6", "2"]
    assert run(capsys, "latin", "2")[0] == 3


def test_fixture_env_override(capsys, tmp_path, monkeypatch):
    (tmp_path / "mine.cfg").write_text(serialize(planted_lines(lines=1, per_line=3, extra=0, d=2)))
    monkeypatch.setenv("OLINES_FIXTURES", str(tmp_path))
    code, out, _ = run(capsys, "stats", "mine.cfg")
    assert code == 0 and out.strip() == "t2=0 t3=1"
    assert run(capsys, "stats", "hesse.cfg")[0] == 3


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "olines", "stats", "triangle.cfg"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip() == "t2=3"
