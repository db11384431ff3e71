import json
import subprocess
import sys
from fractions import Fraction

import pytest

from delegation.cli import run


def call(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def files(tmp_path, capsys):
    def gen(*argv):
        path = tmp_path / f"inst{len(list(tmp_path.iterdir()))}.json"
        code, _, _ = call(capsys, "gen", *argv, "-o", str(path))
        assert code == 0
        return str(path)

    return gen


def test_single_bad_solve(files, capsys, tmp_path):
    inst = files("single-bad", "--n", "2")
    code, out, _ = call(capsys, "solve-det", "-i", inst, "--k", "1")
    doc = json.loads(out)
    assert code == 0 and doc["value"] == "1/2" and doc["k"] == 1
    menu = tmp_path / "menu.json"
    menu.write_text(out)
    code, out, _ = call(capsys, "verify", "-i", inst, "-m", str(menu))
    assert code == 0 and json.loads(out)["ok"]


def test_randomized_and_verify(files, capsys, tmp_path):
    inst = files("single-bad", "--n", "2")
    code, out, _ = call(capsys, "solve-rand", "-i", inst)
    assert code == 0 and json.loads(out)["value"] == "1"
    menu = tmp_path / "rand.json"
    menu.write_text(out)
    assert call(capsys, "verify", "-i", inst, "-m", str(menu))[0] == 0


def test_verify_reports_violation(files, capsys, tmp_path):
    inst = files("single-bad", "--n", "2")
    bad = {"version": 1, "kind": "deterministic", "direct": True,
           "schemes": [{"action": "a1", "payments": ["2", "0"]}, {"action": "a2", "payments": ["0", "1"]}]}
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(bad))
    code, out, _ = call(capsys, "verify", "-i", inst, "-m", str(path))
    assert code == 2 and not json.loads(out)["ok"]


def test_robustify(files, capsys, tmp_path):
    inst = files("single-bad", "--n", "2")
    _, out, _ = call(capsys, "solve-det", "-i", inst, "--k", "2")
    menu = tmp_path / "menu.json"
    menu.write_text(out)
    code, out, _ = call(capsys, "robustify", "-i", inst, "-m", str(menu), "--delta", "1/100")
    doc = json.loads(out)
    assert code == 0 and doc["provider_slack"] == "1/10"
    assert [it["q"] for it in doc["items"]] == ["9/10", "9/10"]


def test_hardness_beta(capsys):
    code, out, _ = call(capsys, "gen", "hardness", "--vertices", "2")
    assert code == 0 and json.loads(out)["beta"] == "1/120"


def test_oracle_and_guard(files, capsys):
    inst = files("single-bad", "--n", "3")
    code, out, _ = call(capsys, "oracle", "-i", inst, "--k", "2")
    assert code == 0 and json.loads(out)["value"] == "2/3"
    code, _, err = call(capsys, "oracle", "-i", inst, "--k", "3", "--limit", "10")
    assert code == 3 and "limit" in err


def test_compare_table(files, capsys):
    inst = files("random", "--n", "3", "--ell", "3", "--m", "2", "--seed", "4")
    code, out, _ = call(capsys, "compare", "-i", inst, "--format", "table")
    assert code == 0 and "OPT_1" in out and "randomized" in out and "(approx)" in out


def test_solve_cont(capsys):
    code, out, _ = call(capsys, "solve-cont", "--delta", "1/16")
    doc = json.loads(out)
    assert code == 0 and doc["family"] == "toy"
    assert Fraction(doc["value"]) >= Fraction(doc["guarantee"])


@pytest.mark.parametrize(
    "argv",
    [
        ("solve-det", "--k", "0"),
        ("gen", "randomized-gap", "--n", "3"),
        ("solve-det", "-i", "/nonexistent/file.json"),
        ("solve-cont", "--delta", "0"),
        ("frobnicate",),
    ],
)
def test_usage_errors(capsys, argv):
    assert call(capsys, *argv)[0] == 1


def test_malformed_instance(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"version": 1, "types": ["t1"]}')
    code, _, err = call(capsys, "solve-det", "-i", str(path))
    assert code == 1 and "invalid input" in err


def test_module_pipe():
    gen = subprocess.run([sys.executable, "-m", "delegation", "gen", "single-bad", "--n", "2"],
                         capture_output=True, check=True)
    out = subprocess.run([sys.executable, "-m", "delegation", "solve-det", "--k", "1"],
                         input=gen.stdout, capture_output=True, check=True)
    assert json.loads(out.stdout)["value"] == "1/2"
