import csv
import json
import subprocess
import sys

import pytest

from msalloc.cli import main

SMALL = {"nodes": 3, "p": 0.5, "classes": [{"weight": 8, "budget": 3}, {"weight": 5, "budget": 3}]}


@pytest.fixture
def doc(tmp_path):
    def write(content, name="problem.json"):
        path = tmp_path / name
        path.write_text(content if isinstance(content, str) else json.dumps(content))
        return str(path)

    return write


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


@pytest.mark.parametrize("method", ["exact", "fast", "oracle"])
def test_solve(doc, capsys, method):
    code, out, _ = run(["solve", "--input", doc(SMALL), "--method", method], capsys)
    assert code == 0
    report = json.loads(out)
    assert report["allocation"] == [2, 1]
    assert report["method"] == method
    assert report["weighted_sum"] == 8.5
    assert report["per_class_success"] == [0.75, 0.5]


def test_solve_random_needs_seed(doc, capsys):
    code, _, err = run(["solve", "--input", doc(SMALL), "--method", "random"], capsys)
    assert code == 2 and "seed" in err
    code, out, _ = run(["solve", "--input", doc(SMALL), "--method", "random", "--seed", "4"], capsys)
    assert code == 0
    assert sum(json.loads(out)["allocation"]) == 3


def test_presets_fig3(tmp_path, capsys):
    out = tmp_path / "fig3.csv"
    code, _, _ = run(["presets", "fig3", "--steps", "99", "--seed", "1", "--out", str(out)], capsys)
    assert code == 0
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 99
    assert all(float(r["fast"]) == float(r["exact"]) for r in rows)
    assert list(rows[0]) == ["p", "exact", "fast", "bound", "random_mean", "random_std"]


def test_presets_need_seed(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["presets", "fig4"])
    assert exc.value.code == 2


def test_sweep_and_byte_identity(doc, capsys):
    argv = ["sweep", "--input", doc(SMALL), "--p-min", "0.1", "--p-max", "0.9", "--steps", "5", "--seed", "7"]
    _, first, _ = run(argv, capsys)
    _, second, _ = run(argv, capsys)
    assert first == second
    assert first.count("\n") == 6


def test_bound(doc, capsys):
    code, out, _ = run(["bound", "--input", doc({"nodes": 2, "p": 0.5, "classes": [{"weight": 1, "budget": 2}]})], capsys)
    assert code == 0
    assert json.loads(out)["bound"] == pytest.approx(0.75, abs=1e-12)


def test_threshold(doc, capsys):
    problem = {"nodes": 10, "p": 0.5, "classes": [{"weight": 3, "budget": 10}]}
    code, out, _ = run(["threshold", "--input", doc(problem), "--epsilon", "0.1"], capsys)
    assert code == 0
    th = json.loads(out)
    assert th["statement_form"] == pytest.approx(1 - (0.1 / 3) ** 0.1)
    assert th["proof_form"] == th["statement_form"]
    assert th["degenerate"] is False


def test_supernode_modes(doc, capsys):
    problem = {
        "nodes": 2,
        "p": 0.5,
        "classes": [{"weight": 8, "budget": 4}, {"weight": 5, "budget": 4}],
        "capacities": [2, 2],
    }
    path = doc(problem)
    code, out, _ = run(["supernode", "--input", path, "--access", "correlated"], capsys)
    assert code == 0
    result = json.loads(out)
    assert result["assignment"] == [[1, 1], [1, 1]]
    assert result["report"]["per_class_success"] == [0.75, 0.75]
    code, out, _ = run(["supernode", "--input", path, "--access", "independent"], capsys)
    assert code == 0
    assert json.loads(out)["nodes"] == 4


def test_supernode_needs_capacities(doc, capsys):
    code, _, err = run(["supernode", "--input", doc(SMALL)], capsys)
    assert code == 2 and "capacities" in err


def test_simulate(doc, capsys):
    code, out, _ = run(["simulate", "--input", doc(SMALL), "--seed", "3", "--trials", "20000"], capsys)
    assert code == 0
    for c in json.loads(out)["classes"]:
        assert abs(c["estimate"] - c["analytic"]) <= 4 * c["stderr"]


def test_infeasible_exit(doc, tmp_path, capsys):
    problem = {"nodes": 10, "p": 0.5, "classes": [{"weight": 8, "budget": 3, "min_success": 0.9}]}
    out = tmp_path / "report.json"
    code, _, err = run(["solve", "--input", doc(problem), "--out", str(out)], capsys)
    assert code == 1
    assert "floor" in err
    assert not out.exists()


def test_malformed_exit(doc, tmp_path, capsys):
    bad = {"nodes": 3, "p": 0.5, "classes": [{"weight": -8, "budget": 3}]}
    out = tmp_path / "report.json"
    code, _, _ = run(["solve", "--input", doc(bad), "--out", str(out)], capsys)
    assert code == 2
    assert not out.exists()
    assert list(tmp_path.iterdir()) == [tmp_path / "problem.json"]


@pytest.mark.parametrize("content", ["{not json", json.dumps({"nodes": 3, "p": 0.5, "classes": [], "x": 1})])
def test_malformed_documents(doc, capsys, content):
    code, _, _ = run(["solve", "--input", doc(content)], capsys)
    assert code == 2


def test_missing_file(capsys, tmp_path):
    code, _, _ = run(["solve", "--input", str(tmp_path / "absent.json")], capsys)
    assert code == 2


def test_oracle_cap_exit(doc, tmp_path, capsys):
    big = {"nodes": 60, "p": 0.5, "classes": [{"weight": 1, "budget": 60}] * 6}
    out = tmp_path / "report.json"
    code, _, err = run(["solve", "--input", doc(big), "--method", "oracle", "--out", str(out)], capsys)
    assert code == 3
    assert not out.exists()


def test_module_entry_point(doc):
    path = doc(SMALL)
    cmd = [sys.executable, "-m", "msalloc", "solve", "--input", path]
    first = subprocess.run(cmd, capture_output=True, check=True).stdout
    second = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert first == second
    assert json.loads(first)["allocation"] == [2, 1]
