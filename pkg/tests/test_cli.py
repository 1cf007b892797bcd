import csv
import json
import shutil
import subprocess

import pytest

from netdistancing.cli import (
    AnalysisReport,
    InputError,
    analyze,
    emit_report,
    main,
    rational,
)
from netdistancing.fixtures import fixture_path
from netdistancing.network import build_network

from conftest import empty


def run(capsys, *argv):
    try:
        code = main([str(a) for a in argv])
    except SystemExit as exc:  # argparse usage errors
        code = exc.code
    out, err = capsys.readouterr()
    return code, out, err


def fx(name):
    return str(fixture_path(name))


@pytest.fixture
def edgeless_file(tmp_path):
    p = tmp_path / "empty.txt"
    p.write_text("4\n")
    return p


def test_rational():
    assert rational(1 / 3) == "1/3"
    assert rational(0.25) == "1/4"
    assert rational(0.1234567891234) is None


def test_analyze_fig3(capsys):
    code, out, _ = run(capsys, "analyze", "--input", fx("fig3"), "--r", "0", "--exact")
    assert code == 0
    d = json.loads(out)
    rows = {tuple(e["nodes"]): e for e in d["summary"]}
    assert rows[(3, 5, 9)]["lambda_rational"] == "1/3"
    assert rows[(6, 7, 8, 9, 10)]["lambda_rational"] == "1/5"
    assert rows[(6, 7, 8, 9, 10)]["best"] and not rows[(3, 5, 9)]["best"]
    lams = [e["lambda"] for e in d["summary"]]
    assert lams == sorted(lams)
    assert d["oracle"]["count"] == 7 and d["oracle"]["matched"] == 7


def test_analyze_fig5_listed_supports(capsys):
    code, out, _ = run(capsys, "analyze", "-i", fx("fig5"), "--r", "0,1,2", "--exact")
    assert code == 0
    d = json.loads(out)
    rows = {tuple(e["nodes"]): e for e in d["summary"]}
    want = {
        (5, 6, 7, 8): "strongly_rigid",
        tuple(range(9, 17)): "weakly_rigid",
        tuple(range(5, 17)): "weakly_rigid",
    }
    for nodes, cls in want.items():
        assert rows[nodes]["class"] == cls and rows[nodes]["lambda_rational"] == "1/4"
    assert d["oracle"] == {"skipped": "n = 16 > 14"}


def test_analyze_edgeless(edgeless_file, capsys):
    code, out, _ = run(capsys, "analyze", "-i", edgeless_file, "--exact")
    d = json.loads(out)
    assert code == 0 and len(d["summary"]) == 1
    (eq,) = d["runs"][0]["equilibria"]
    assert eq["x"] == [0.25] * 4 and eq["lambda_rational"] == "1/4"


def test_analyze_determinism(capsys):
    argv = ("analyze", "-i", fx("fig4"), "--r", "0,1,3", "--seed", "5")
    outs = {run(capsys, *argv)[1] for _ in range(3)}
    assert len(outs) == 1


def test_analyze_json_round_trip(fig4):
    rep = analyze(fig4, [0, 1, 2, 3], exact=True)
    text = emit_report(rep, "json")
    assert json.loads(text) == json.loads(json.dumps(rep.to_dict()))
    assert emit_report(json.loads(text), "json") == text


def test_text_table_rows_sorted(fig3):
    rep = analyze(fig3, [0], exact=True)
    lines = emit_report(rep, "text").splitlines()
    header = next(i for i, line in enumerate(lines) if line.lstrip().startswith("r "))
    rows = [line for line in lines[header + 1 :] if line.strip() and not line.startswith("oracle")]
    assert len(rows) == 7
    lams = [float(r.split()[1]) for r in rows]
    assert lams == sorted(lams)
    assert "*" in rows[0] and "[6, 7, 8, 9, 10]" in rows[0]


def test_empty_search_line(capsys):
    code, out, _ = run(capsys, "--format", "text", "analyze", "-i", fx("fig4"), "--r", "2")
    assert code == 0
    assert "r=2: 0 equilibria, 1 rejected" in out
    assert "fails: outside_ok" in out


def test_global_flags_either_side(capsys):
    a = run(capsys, "--format", "text", "--input", fx("fig3"), "analyze")[1]
    b = run(capsys, "analyze", "--format", "text", "--input", fx("fig3"))[1]
    assert a == b and a.startswith("network:")


# -- exit codes -------------------------------------------------------------


@pytest.mark.parametrize(
    "argv",
    [
        ("analyze", "-i", "/nonexistent.json"),
        ("analyze",),
        ("analyze", "-i", "FIG3", "--r", "10"),
        ("analyze", "-i", "FIG3", "--r", "x"),
        ("frobnicate", "-i", "FIG3"),
        ("verify", "-i", "FIG3", "--strategy", "1,2"),
        ("verify", "-i", "FIG3", "--strategy", "a,b"),
        ("equilibrium", "-i", "FIG4", "--support", "1,2,3,4,5", "--r", "2"),
        ("equilibrium", "-i", "FIG4", "--support", "1,99", "--r", "0"),
        ("classify", "-i", "FIG4", "--strategy", "1,0,0,0,0,0,0,0,0,0"),
        ("enumerate", "-i", "FIG5"),
        ("analyze", "-i", "FIG3", "--diag", "3"),
    ],
)
def test_input_errors_exit_1(capsys, argv):
    argv = [fx(a.lower()) if a.startswith("FIG") else a for a in argv]
    code, out, err = run(capsys, *argv)
    assert code == 1 and out == "" and err


def test_bad_file_diagnostics(tmp_path, capsys):
    p = tmp_path / "g.txt"
    p.write_text("3\n1 2\n2 three\n")
    code, _, err = run(capsys, "analyze", "-i", p)
    assert code == 1 and "line 3" in err


def test_invariant_violation_exit_2(capsys, monkeypatch):
    import netdistancing.cli as cli

    monkeypatch.setattr(cli, "enumerate_nash", lambda *a, **k: [])
    code, _, err = run(capsys, "analyze", "-i", fx("fig3"), "--exact")
    assert code == 2 and "invariant" in err


def test_empty_findings_exit_0(tmp_path, capsys):
    p = tmp_path / "path.txt"
    p.write_text("3\n1 2\n2 3\n")
    code, out, _ = run(capsys, "find", "-i", p, "--r", "2")
    assert code == 0 and json.loads(out)["supports"] == []
    code, out, _ = run(capsys, "analyze", "-i", p, "--r", "2", "--exact", "--format", "text")
    assert code == 0 and "no supports found for r=2" in out


# -- other subcommands ------------------------------------------------------


def test_complement(tmp_path, capsys):
    out_path = tmp_path / "c.json"
    code, out, _ = run(capsys, "complement", "-i", fx("fig4"), "-o", out_path)
    d = json.loads(out)
    assert code == 0 and d["diag"] == 0.0 and len(d["edges"]) == 45 - 15
    assert json.loads(out_path.read_text()) == d


def test_find(capsys):
    _, out, _ = run(capsys, "find", "-i", fx("fig4"), "--r", "3")
    (s,) = json.loads(out)["supports"]
    assert s["nodes"] == list(range(1, 11)) and s["mode"] == "heuristic"
    _, out, _ = run(capsys, "find", "-i", fx("fig4"), "--r", "1", "--exact")
    assert len(json.loads(out)["supports"]) == 5


def test_equilibrium_weighted(capsys):
    _, out, _ = run(capsys, "equilibrium", "-i", fx("fig4_weighted"), "--support", "4,6,7", "--r", "0")
    d = json.loads(out)
    assert d["lambda_rational"] == "2/5" and d["certificate"]["is_nash"]
    _, out, _ = run(capsys, "equilibrium", "-i", fx("fig4_weighted"), "--support", "3,5,9", "--r", "0")
    d = json.loads(out)
    assert not d["sufficient"] and not d["certificate"]["is_nash"]


def test_weight_overrides(capsys):
    argv = ["equilibrium", "-i", fx("fig4"), "--support", "4,6,7", "--r", "0"]
    w = ["--weights", "2,2,2,2,2,1,1,1,1,1", "--scheme", "additive"]
    _, out, _ = run(capsys, *argv, *w)
    assert json.loads(out)["lambda_rational"] == "2/5"


def test_verify_from_file_and_game(tmp_path, capsys):
    p = tmp_path / "x.json"
    p.write_text(json.dumps({"x": [0, 0, 1 / 3, 0, 1 / 3, 0, 0, 0, 1 / 3, 0]}))
    _, out, _ = run(capsys, "verify", "-i", fx("fig3"), "--strategy", p)
    d = json.loads(out)
    assert d["is_nash"] and d["lambda_rational"] == "1/3" and d["game"] == "distancing"
    comp = tmp_path / "comp.json"
    run(capsys, "complement", "-i", fx("fig3"), "-o", comp)
    _, out, _ = run(capsys, "verify", "-i", comp, "--strategy", p, "--game", "networking")
    d = json.loads(out)
    assert d["is_nash"] and d["lambda_rational"] == "2/3"


def test_verify_text(capsys):
    _, out, _ = run(capsys, "verify", "-i", fx("fig3"), "--strategy", "0,0,1/3,0,1/3,0,0,0,1/3,0", "--format", "text")
    assert "is_nash: True" in out


def test_classify(capsys):
    _, out, _ = run(capsys, "classify", "-i", fx("fig4"), "--strategy", ",".join(["1/10"] * 10))
    d = json.loads(out)
    assert d["class"] == "fragile" and d["method"] == "both" and d["flexible"]
    _, out, _ = run(
        capsys, "classify", "-i", fx("fig3"), "--strategy", "0,0,0,0,0,.2,.2,.2,.2,.2", "--method", "spectral"
    )
    assert json.loads(out)["class"] == "strongly_rigid"


def test_enumerate(capsys):
    _, out, _ = run(capsys, "enumerate", "-i", fx("fig4"))
    d = json.loads(out)
    assert d["count"] == 61 and len(d["equilibria"]) == 61
    _, out, _ = run(capsys, "enumerate", "-i", fx("fig5"), "--max-n", "16")
    assert json.loads(out)["count"] == 13377


def test_simulate(tmp_path, capsys):
    csv_path = tmp_path / "t.csv"
    argv = ("simulate", "-i", fx("fig3"), "--seed", "4", "--csv", csv_path)
    code, out, _ = run(capsys, *argv)
    d = json.loads(out)
    assert code == 0 and d["converged"] and d["certificate"]["is_nash"]
    rows = list(csv.reader(csv_path.open()))
    assert rows[0] == ["step", "payoff"] and len(rows) == d["steps"] + 2
    assert run(capsys, *argv)[1] == out
    code, out, _ = run(capsys, "simulate", "-i", fx("fig3"), "--x0", "0,0,1/3,0,1/3,0,0,0,1/3,0")
    assert json.loads(out)["steps"] <= 1


def test_analyze_api_errors():
    with pytest.raises(InputError):
        analyze(empty(3), [3])
    rep = analyze(build_network(1, []), [0], exact=True)
    assert isinstance(rep, AnalysisReport) and rep.oracle["count"] == 1


@pytest.mark.skipif(shutil.which("netdistancing") is None, reason="console script not installed")
def test_console_script():
    res = subprocess.run(
        ["netdistancing", "analyze", "-i", fx("fig3"), "--r", "0", "--format", "text"],
        capture_output=True,
        text=True,
    )
    assert res.returncode == 0 and "[6, 7, 8, 9, 10]" in res.stdout
