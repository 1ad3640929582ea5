import csv
import io
import json

import pytest

from portbased.cli import TABLE_COLUMNS, main, parse_range, parse_tolerances


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_parse_helpers():
    assert parse_range("2..5") == (2, 3, 4, 5)
    assert parse_range("2,4") == (2, 4)
    assert parse_range("3") == (3,)
    assert parse_tolerances(["naimark=1e-9"]) == {"naimark": 1e-9}
    for bad in ("5..2", "x", ""):
        with pytest.raises(ValueError):
            parse_range(bad)


def test_table_csv_is_deterministic(capsys):
    code, first, _ = run(capsys, "table", "--n-range", "2..3", "--d-range", "2")
    assert code == 0
    _, second, _ = run(capsys, "table", "--n-range", "2..3", "--d-range", "2")
    assert first == second
    rows = list(csv.reader(io.StringIO(first)))
    assert tuple(rows[0]) == TABLE_COLUMNS
    assert len(rows) > 1


def test_verify_json_and_fault(capsys):
    code, out, _ = run(capsys, "verify", "--max-n", "2", "--max-d", "2", "--suite", "measurements")
    report = json.loads(out)
    assert code == 0 and report["passed"]
    code, out, err = run(capsys, "verify", "--max-n", "2", "--max-d", "2", "--suite", "measurements",
                         "--inject-fault", "perturb-g")
    assert code == 1 and not json.loads(out)["passed"] and "FAIL" in err


@pytest.mark.parametrize("argv", [
    ["verify", "--inject-fault", "nonsense"],
    ["table", "--n", "3"],
    ["verify", "--tolerance", "naimark=-1"],
    ["simulate", "--encoding", "qubits"],
    ["frobnicate"],
])
def test_bad_configuration_exits_2(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_guard_exit_code(capsys, monkeypatch):
    monkeypatch.setenv("PORTBASED_MAX_DIM", "8")
    assert run(capsys, "simulate", "--n", "3", "--d", "2")[0] == 3


def test_simulate_echoes_seed(capsys):
    code, out, _ = run(capsys, "simulate", "--n", "2", "--d", "2", "--seed", "17", "--trials", "2")
    data = json.loads(out)
    assert code == 0 and data["seed"] == 17
    _, again, _ = run(capsys, "simulate", "--n", "2", "--d", "2", "--seed", "17", "--trials", "2")
    assert again == out


def test_config_file_flags_win(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"n": 2, "d": 3, "seed": 5, "trials": 1}))
    _, out, _ = run(capsys, "--config", str(cfg), "simulate", "--d", "2")
    data = json.loads(out)
    assert data["n"] == 2 and data["d"] == 2 and data["seed"] == 5
    bad = tmp_path / "bad.json"
    bad.write_text("[1, 2]")
    assert run(capsys, "--config", str(bad), "simulate")[0] == 2


def test_diagram_and_resource(capsys, tmp_path):
    code, out, _ = run(capsys, "diagram", "--n", "3", "--d", "2")
    assert code == 0 and out.startswith("digraph")
    code, out, _ = run(capsys, "diagram", "--n", "2", "--d", "2", "--format", "json", "--dilated")
    assert code == 0 and json.loads(out)
    code, out, _ = run(capsys, "resource", "--n", "3", "--d", "2", "--resource", "optimized", "--protocol", "ppbt")
    assert code == 0 and json.loads(out)["passed"]
    ffile = tmp_path / "f.json"
    ffile.write_text(json.dumps({"(2)": 0.5, "(1,1)": 0.5}))
    code, out, _ = run(capsys, "resource", "--n", "2", "--d", "2", "--resource", "custom-f", "--f-file", str(ffile))
    assert code == 0


def test_gatecount_output(capsys, tmp_path):
    target = tmp_path / "gc.csv"
    code, _, _ = run(capsys, "gatecount", "--n-range", "3..5", "--d-range", "2", "-o", str(target))
    text = target.read_text()
    assert code == 0 and text.startswith("encoding,n,d,total,depth") and "# fit" in text
    code, out, _ = run(capsys, "gatecount", "--n-range", "3..4", "--d-range", "2", "--format", "json")
    assert code == 0 and "rows" in json.loads(out)
