import json
import subprocess
import sys

import pytest

from nonsingular.cli import cli_main


def run(argv, capsys):
    code = cli_main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_bounds(capsys):
    code, out, _ = run(["bounds", "--d", "3", "--e", "2"], capsys)
    assert code == 0 and json.loads(out)["thm3_threshold"] == 90


def test_bounds_with_q(capsys):
    code, out, _ = run(["bounds", "--d", "2", "--e", "1", "--q", "107", "--n", "3"], capsys)
    doc = json.loads(out)
    assert doc["thm2_satisfied"] == "yes" and doc["leep_yeomans_lower"] == 108
    assert 10784 < doc["cafure_matera_rhs"]["approx"] < 10786


def test_count(capsys):
    code, out, _ = run(["count", "--field", "5", "--nvars", "3", "--poly", "x0*x2 - x1^2"], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["N_projective"] == 6 and doc["N_affine"] == 25
    assert "elapsed" not in doc


def test_count_with_h(capsys):
    code, out, _ = run(["count", "--field", "5", "--nvars", "3", "--poly", "x0*x2 - x1^2",
                        "--h", "x0"], capsys)
    assert json.loads(out)["S2"] == 5


def test_find_nonsingular(capsys, tmp_path):
    path = tmp_path / "w.json"
    code, out, _ = run(["find-nonsingular", "--field", "3", "--nvars", "3",
                        "--poly", "x0^2 + x1^2 + x2^2", "--json", str(path)], capsys)
    assert code == 0 and json.loads(out)["witness"]["point"] == [1, 1, 1]
    assert json.loads(path.read_text()) == json.loads(out)
    code, out, _ = run(["find-nonsingular", "--field", "3", "--nvars", "2",
                        "--poly", "x0^2 + 2*x0*x1 + x1^2"], capsys)
    assert code == 1 and json.loads(out)["witness"] is None


def test_find_via_slicing(capsys):
    code, out, _ = run(["find-nonsingular", "--field", "23", "--nvars", "3",
                        "--poly", "x0*x2 - x1^2", "--via-slicing", "--seed", "2"], capsys)
    assert code == 0 and json.loads(out)["witness"]["slices_tried"] >= 1


def test_slice(capsys):
    code, out, _ = run(["slice", "--field", "5", "--nvars", "3", "--poly", "x0*x2 - x1^2",
                        "--xi", "0,0,0,1,0,0,1"], capsys)
    doc = json.loads(out)
    assert doc["sliced"] == "4*x0^2 + x0*x1" and doc["classification"] == "bad"
    code, out, _ = run(["slice", "--field", "19", "--nvars", "3", "--poly", "x0*x2 - x1^2",
                        "--trials", "40"], capsys)
    assert json.loads(out)["bad_slices"]["within_bound"]


def test_verify_and_csv(capsys, tmp_path):
    csv_path = tmp_path / "r.csv"
    code, out, err = run(["verify", "thm3", "--d", "2", "--n", "3", "--q", "19",
                          "--samples", "5", "--seed", "7", "--csv", str(csv_path)], capsys)
    assert code == 0 and json.loads(out)["summary"]["pass"] == 5
    assert "pass=5" in err
    assert csv_path.read_text().count("\n") == 6


def test_verify_multi_q(capsys):
    code, out, _ = run(["verify", "leep-yeomans", "--d", "3", "--q", "7,11", "--samples", "3"], capsys)
    assert code == 0 and len(json.loads(out)["outcomes"]) == 6


def test_seed_from_environment(capsys, monkeypatch):
    monkeypatch.setenv("NONSINGULAR_SEED", "13")
    code, out, _ = run(["gen", "--field", "7", "--d", "2"], capsys)
    assert json.loads(out)["seed"] == 13
    code, again, _ = run(["gen", "--field", "7", "--d", "2", "--seed", "13"], capsys)
    assert out == again
    monkeypatch.setenv("NONSINGULAR_SEED", "x")
    assert run(["gen", "--field", "7", "--d", "2"], capsys)[0] == 2


@pytest.mark.parametrize("argv", [
    ["bogus"],
    ["count", "--field", "6", "--nvars", "3", "--poly", "x0"],
    ["count", "--field", "5", "--nvars", "3", "--poly", "x0 +"],
    ["verify", "thm2", "--d", "2", "--e", "1", "--q", "103"],
    ["verify", "thm2", "--q", "7,11"],
    ["bounds"],
])
def test_usage_errors(argv, capsys):
    assert run(argv, capsys)[0] == 2


def test_budget_exit_code(capsys):
    code, out, _ = run(["verify", "thm3", "--d", "2", "--q", "19", "--samples", "2",
                        "--budget-search", "3"], capsys)
    assert code == 3 and json.loads(out)["summary"]["undecided"] == 2
    code, _, err = run(["count", "--field", "7", "--nvars", "3", "--poly", "x0",
                        "--budget-evals", "10"], capsys)
    assert code == 3 and "budget" in err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "nonsingular", "bounds", "--d", "2"],
                          capture_output=True, text=True, check=True)
    assert json.loads(proc.stdout)["thm3_threshold"] == 18
