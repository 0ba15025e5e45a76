from __future__ import annotations

import json

import pytest

from finitary.cli import main
from finitary.tableio import dumps, read_table, table_to_dict

PAPER_GRID = [
    "Event | O1 | O2 | O3 | O4",
    "0     | +  | -  | -  | -",
    "pi/2  | +  | +  | -  | +",
    "pi    | -  | +  | -  | -",
    "3pi/2 | +  | +  | +  | -",
]


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_simulate_circle_text(capsys):
    code, out, err = run(capsys, "simulate", "--fixture", "paper-circle", "--grid", "4", "--format", "text")
    assert code == 0
    assert out.splitlines() == PAPER_GRID
    assert "dropped events: 0" in err


def test_simulate_writes_json_and_grid(tmp_path, capsys):
    path = tmp_path / "circle.json"
    code, _, _ = run(capsys, "simulate", "--fixture", "paper-circle", "--grid", "4", "--output", str(path))
    assert code == 0
    assert (tmp_path / "circle.txt").read_text().splitlines() == PAPER_GRID
    table = read_table(path)
    assert path.read_text() == dumps(table_to_dict(table))
    assert read_table(tmp_path / "circle.txt") == table


def test_simulate_interval_grid_nine(capsys):
    code, out, _ = run(capsys, "simulate", "--fixture", "paper-interval", "--grid", "9")
    doc = json.loads(out)
    assert code == 0
    assert doc["observers"] == ["O1", "O2", "O3"]
    labels = ["1/10", "1/5", "3/10", "2/5", "1/2", "3/5", "7/10", "4/5", "9/10"]
    assert [e["label"] for e in doc["events"]] == labels
    assert all(e["registered_by"] for e in doc["events"])


@pytest.mark.parametrize("argv", [["simulate", "--fixture", "paper-circle", "--grid", "0"], ["simulate"], ["simulate", "--fixture", "nope"]])
def test_simulate_usage_errors(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_argparse_errors_exit_two(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2


def test_round_trip_simulate_substitute_verify(tmp_path, capsys):
    path = tmp_path / "t.json"
    run(capsys, "simulate", "--fixture", "paper-circle", "--output", str(path))
    code, out, _ = run(capsys, "substitute", "--table", str(path))
    assert code == 0
    doc = json.loads(out)
    assert len(doc["classes"]) == 4 and len(doc["covering"]) == 4
    code, out, _ = run(capsys, "verify", "--table", str(path))
    assert code == 0 and json.loads(out)["summary"]["theorem_holds"] == 1


def test_substitute_text_and_dot(capsys):
    _, out, _ = run(capsys, "substitute", "--fixture", "paper-circle", "--format", "text")
    assert "  pi/2 -> 0" in out
    _, out, _ = run(capsys, "substitute", "--fixture", "paper-circle", "--format", "dot")
    assert out.count("->") == 4


def test_substitute_identical_rows(tmp_path, capsys):
    path = tmp_path / "same.txt"
    path.write_text("Event A B\na + -\nb + -\nc + -\n")
    _, out, _ = run(capsys, "substitute", "--table", str(path))
    assert len(json.loads(out)["classes"]) == 1


def test_substitute_invalid_table(tmp_path, capsys):
    path = tmp_path / "bad.txt"
    path.write_text("Event A\na -\n")
    code, _, err = run(capsys, "substitute", "--table", str(path))
    assert code == 2 and "no observer" in err
    assert run(capsys, "substitute", "--table", str(tmp_path / "missing.json"))[0] == 2


def test_random_output_deterministic(capsys):
    a = run(capsys, "verify", "--random", "20", "--seed", "5")[1]
    b = run(capsys, "verify", "--random", "20", "--seed", "5")[1]
    c = run(capsys, "verify", "--random", "20", "--seed", "6")[1]
    assert a == b != c


def test_algebra_command(capsys):
    code, out, _ = run(capsys, "algebra", "--fixture", "paper-circle", "--multiply", "|pi/2><pi/2| + |pi/2><0|", "|0><0|")
    doc = json.loads(out)
    assert code == 0
    assert doc["dimension"] == 8
    assert [s["codimension"] for s in doc["spectrum"]] == [1, 1, 1, 1]
    assert doc["product"] == "|pi/2><0|"
    assert run(capsys, "algebra", "--fixture", "paper-circle", "--multiply", "|0><pi|", "|0><0|")[0] == 2


def test_rota_command(capsys):
    code, out, _ = run(capsys, "rota", "--fixture", "paper-circle")
    doc = json.loads(out)
    assert code == 0 and doc["matches_covering"]
    assert doc["rho"] == [["3pi/2", "0"], ["3pi/2", "pi"], ["pi/2", "0"], ["pi/2", "pi"]]
    assert doc["witnesses"]["pi/2 0"] == ["|pi/2><0|"]


def test_verify_fixture_with_oracle(capsys):
    code, out, _ = run(capsys, "verify", "--fixture", "paper-circle", "--oracle")
    doc = json.loads(out)
    (rep,) = doc["reports"]
    assert code == 0
    assert rep["theorem_holds"] and rep["open_counts"] == {"rota": 7, "sorkin": 7}
    assert rep["oracle"] == {"checked": 16, "mismatches": []}


def test_verify_oracle_skip_is_not_failure(capsys):
    code, out, _ = run(capsys, "verify", "--fixture", "paper-circle", "--oracle", "--dim-bound", "4")
    doc = json.loads(out)
    assert code == 0
    assert "skipped" in doc["reports"][0]["oracle"]
    assert doc["summary"]["oracle_skipped"] == 1
    assert run(capsys, "verify", "--fixture", "paper-circle", "--dim-bound", "0")[0] == 2


def test_verify_random_suite_parallel_matches_serial(capsys):
    serial = run(capsys, "verify", "--random", "30", "--seed", "2")[1]
    parallel = run(capsys, "verify", "--random", "30", "--seed", "2", "--jobs", "2")[1]
    assert serial == parallel


def test_verify_falsified_exit_code(monkeypatch, capsys):
    import finitary.algebra as alg

    monkeypatch.setattr(alg, "rota_relation", lambda basis: frozenset())
    code, out, _ = run(capsys, "verify", "--fixture", "paper-circle")
    assert code == 1
    assert json.loads(out)["reports"][0]["witness"]


def test_nerve_interval_artifact(capsys):
    code, out, err = run(capsys, "nerve", "--fixture", "paper-interval")
    doc = json.loads(out)
    assert code == 0
    assert doc["dimension"] == 2 and doc["space_dimension"] == 1 and doc["artifact"]
    assert doc["maximal_faces"] == [["O1", "O2", "O3"]]
    assert "nerve dimension 2, space dimension 1" in err and "warning" in err


def test_nerve_circle_empirical(capsys):
    _, out, _ = run(capsys, "nerve", "--fixture", "paper-circle", "--mode", "empirical", "--grid", "4")
    assert json.loads(out)["maximal_faces"] == [["O1", "O2", "O3"], ["O1", "O2", "O4"]]


def test_nerve_single_region(tmp_path, capsys):
    spec = tmp_path / "one.json"
    spec.write_text(json.dumps({"space": {"kind": "interval"}, "regions": [{"observer": "A", "interval": [0, 1]}]}))
    _, out, _ = run(capsys, "nerve", "--spec", str(spec))
    assert json.loads(out)["faces"] == [["A"]]


def test_nerve_exact_on_table_is_usage_error(tmp_path, capsys):
    path = tmp_path / "t.json"
    run(capsys, "simulate", "--fixture", "paper-circle", "--output", str(path))
    assert run(capsys, "nerve", "--table", str(path), "--mode", "exact")[0] == 2
    code, out, _ = run(capsys, "nerve", "--table", str(path))
    assert code == 0 and ["O3", "O4"] not in json.loads(out)["faces"]


def test_export_dot(capsys):
    _, out, _ = run(capsys, "export-dot", "--fixture", "paper-circle")
    assert out.startswith("digraph")
    _, out, _ = run(capsys, "export-dot", "--fixture", "paper-interval", "--what", "nerve")
    assert out.startswith("graph") and out.count("--") == 3


def test_global_flags_before_subcommand(tmp_path, capsys):
    out = tmp_path / "p.txt"
    assert main(["--format", "text", "--output", str(out), "substitute", "--fixture", "paper-circle"]) == 0
    assert "covering:" in out.read_text()
