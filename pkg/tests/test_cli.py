import json
import subprocess
import sys

import pytest

from procount.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_group_normal_forms(capsys):
    assert run(capsys, "group", "x1*x0")[:2] == (0, "x0*x1*x0,1^2\n")
    assert run(capsys, "group", "x0*x0*x0")[1] == "e\n"
    assert run(capsys, "group", "[x0,x2]")[1] == "x0,2\n"
    assert run(capsys, "group", "x0*x1", "--graph", "matching")[1] == "x0*x1\n"


def test_group_labelled(capsys):
    code, out, _ = run(capsys, "group", "a(w)*a(v)")
    assert code == 0
    assert out == "a(v)*a(w)*[a(v),a(w)]^2\n"
    # a pair a(v), b(v) commutes
    assert run(capsys, "group", "b(v)*a(v)")[1] == "a(v)*b(v)\n"


def test_group_errors(capsys):
    code, _, err = run(capsys, "group", "x0 *")
    assert code == 2 and "error" in err
    assert run(capsys, "group", "x0", "--p", "4")[0] == 2


def test_tree(capsys):
    code, out, _ = run(capsys, "tree", "--kind", "R", "--k", "2", "--depth", "3")
    data = json.loads(out)
    assert code == 0
    assert data["leaves"] == 16
    assert data["level_counts"] == [1, 4, 8, 16]
    code, out, _ = run(capsys, "tree", "--kind", "S_omega", "--depth", "4")
    nodes = {tuple(s) for s in json.loads(out)["nodes"]}
    assert all((2 * k, 0, 0, 0) in nodes for k in range(4))


def test_tree_bad_tail(capsys):
    assert run(capsys, "tree", "--kind", "T_x", "--x", "1", "--tail", "1,2,3")[0] == 2


def test_perm(capsys):
    code, out, _ = run(capsys, "perm", "compose", "7,4,3,1,0", "3,4,6")
    assert code == 0 and json.loads(out)["result"] == [1, 0]
    code, out, _ = run(capsys, "perm", "inverse", "1,2,0,5")
    assert json.loads(out)["result"] == [2, 0, 1]
    code, out, _ = run(capsys, "perm", "subgroups", "--degree", "3")
    assert json.loads(out)["count"] == 6
    assert run(capsys, "perm", "compose", "1,1", "0")[0] == 2


def test_perm_borel(capsys):
    code, out, _ = run(capsys, "perm", "borel", "--degree", "3")
    assert code == 0 and json.loads(out)["status"] == "pass"


def test_reduce(capsys):
    code, out, _ = run(capsys, "reduce", "--x", "1", "--x-tail", "0,1", "--y", "0", "--y-tail", "0,0",
                       "--M", "2", "--depth", "4", "--width", "2")
    report = json.loads(out)
    assert code == 0 and report["status"] == "pass"
    code, out, _ = run(capsys, "reduce", "--x", "", "--x-tail", "1,0", "--y", "", "--depth", "3",
                       "--width", "4")
    assert code == 0 and json.loads(out)["related"] is False
    assert run(capsys, "reduce", "--x", "5", "--y", "0", "--M", "2")[0] == 2


def test_verify_writes_identical_reports(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run(capsys, "verify", "--suite", "algebra", "--out", str(a))[0] == 0
    _, _, err = run(capsys, "verify", "--suite", "algebra", "--out", str(b))
    assert a.read_bytes() == b.read_bytes()
    assert err.startswith("PASS")
    assert json.loads(a.read_text())["status"] == "pass"


def test_verify_config_errors(capsys, monkeypatch):
    assert run(capsys, "verify", "--suite", "nope")[0] == 2
    assert run(capsys, "verify", "--suite", "algebra", "--depth", "0")[0] == 2
    monkeypatch.setenv("PROCOUNT_THREADS", "zero")
    assert run(capsys, "verify", "--suite", "algebra")[0] == 2


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "procount", "group", "x1*x0"],
                         capture_output=True, text=True, check=True)
    assert res.stdout == "x0*x1*x0,1^2\n"


def test_missing_subcommand():
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2
