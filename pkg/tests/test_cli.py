import csv
import io
import json


from dpsolve.cli import main, rows_csv
from dpsolve.parse import parse_expr, parse_poly

EX1 = "(-y^7+x*y^4-x^2*y+y^2)/(2*x*y^6-7*x^2*y^3+2*x^3+3*x*y)"
EX4 = ("(-2*x^3*y^19+2*x^5*y^14-y^17-2*x^2*y^12+3*x^4*y^7+2*x^2*y^7-2*x*y^5+2*x^3+2*x)/"
       "(y^4*(-5*x^2*y^19+5*x^4*y^14-3*x*y^12-4*x^3*y^7+5*x*y^7+7*x^5*y^2-5*y^5+5*x^2+5))")
KEYS = {"ode", "method", "dg_used", "dps", "integrating_factor", "first_integral", "status", "stats"}


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr()


def test_solve_json_example1(capsys):
    code, out = run(capsys, "solve", "--ode", EX1, "--method", "singer", "--json", "--verify")
    assert code == 0
    doc = json.loads(out.out)
    assert KEYS <= doc.keys()
    assert {d["p"] for d in doc["dps"]} == {"y", "x*y^2-1", "y^3-x"}
    facs = {f["p"]: (f["n_num"], f["n_den"]) for f in doc["integrating_factor"]["factors"]}
    assert facs == {"y": (1, 1), "x*y^2-1": (-1, 1), "y^3-x": (-2, 1)}
    assert doc["integrating_factor"]["exp_num"] is None
    assert doc["first_integral"]["logs"] == [{"c": "-1", "p": "x*y^2-1"}]
    assert all(c["ok"] for c in doc["checks"])
    # every emitted polynomial parses back to itself
    for d in doc["dps"]:
        for k in ("p", "cofactor"):
            assert str(parse_poly(d[k])) == d[k]
    r = parse_expr(doc["first_integral"]["rational"])
    assert str(r) == doc["first_integral"]["rational"]


def test_solve_example4_singer(capsys):
    code, out = run(capsys, "solve", "--ode", EX4, "--method", "singer", "--json", "--timeout", "120")
    assert code == 0
    assert {d["p"] for d in json.loads(out.out)["dps"]} == {"x*y^7+1", "y^5-x^2"}


def test_parse_error_exit(capsys):
    code, out = run(capsys, "solve", "--ode", "x/")
    assert code == 1
    assert "offset 2" in out.err


def test_method_failure_exit(capsys):
    # divergence-free field: every method reports failure
    code, out = run(capsys, "solve", "--ode=-x/y", "--method", "singer", "--json")
    assert code == 2
    doc = json.loads(out.out)
    assert doc["status"] == "failed" and doc["dps"] == []


def test_usage_error_exit(capsys):
    code, _ = run(capsys, "solve", "--method", "singer")
    assert code == 1


def test_text_output(capsys):
    code, out = run(capsys, "solve", "--ode", EX1, "--method", "impa")
    assert code == 0
    assert "first integral:" in out.out and "x*y^2-1" in out.out


def test_bench_empty_corpus(tmp_path, capsys):
    f = tmp_path / "empty.json"
    f.write_text("[]")
    code, out = run(capsys, "bench", "--corpus", str(f), "--methods", "singer")
    assert code == 0
    assert out.out.count("\n") == 2


def test_bench_bad_corpus(tmp_path, capsys):
    code, _ = run(capsys, "bench", "--corpus", str(tmp_path / "missing.json"))
    assert code == 1


def test_bench_rows(tmp_path, capsys):
    out = tmp_path / "res"
    code, _ = run(capsys, "bench", "--cases", "ex2,ex10", "--methods", "singer", "--timeout", "120",
                  "--out", str(out))
    assert code == 0
    rows = list(csv.DictReader(io.StringIO((tmp_path / "res.csv").read_text())))
    assert [(r["case"], r["method"]) for r in rows] == [("ex2", "singer"), ("ex10", "singer")]
    assert rows[0]["status"] == "OK" and rows[0]["match"] == "yes"
    assert (tmp_path / "res.md").read_text().startswith("| case |")


def test_rows_csv_header():
    assert rows_csv([]).splitlines()[0].startswith("case,method,status")
