import csv
import io
import json
import math
import subprocess
import sys

import pytest

from harmonia.cli import SWEEP_HEADER, parse_job_line, run


def invoke(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def invoke_json(*argv):
    code, out, err = invoke(*argv, "--format", "json")
    return code, json.loads(out), err


def test_hh_example():
    code, report, _ = invoke_json("hh", "--fn", "x^2", "--a", "1", "--b", "2")
    assert code == 0
    assert report["left"] == pytest.approx(16 / 9, abs=1e-15)
    assert report["middle"] == pytest.approx(2.0, abs=1e-12)
    assert report["right"] == 2.5
    assert report["holds"] is True
    assert report["tol"] == 1e-10


def test_constants_example():
    code, report, _ = invoke_json("constants", "--a", "1", "--b", "2", "--q", "2")
    assert code == 0
    assert report["lambda1"] == pytest.approx(0.5 - 2 * math.log(9 / 8), rel=1e-14)
    assert report["lambda2"] == pytest.approx(0.08891518, abs=5e-9)
    assert report["mu1"] == pytest.approx(1 / 12, rel=1e-14)
    assert report["mu2"] == pytest.approx(5 / 24, rel=1e-14)


def test_means_example():
    code, report, _ = invoke_json("means", "--a", "3", "--b", "3")
    assert code == 0
    assert [report[k] for k in "AGHLI"] == [3.0] * 5
    assert report["chain_holds"] and report["lp_monotone"]


def test_json_field_order_is_stable():
    _, out, _ = invoke("hh", "--fn", "x", "--a", "1", "--b", "2", "--format", "json")
    keys = list(json.loads(out))
    assert keys[:3] == ["command", "fn", "a"]
    assert keys[-1] == "holds"
    assert keys.index("left") < keys.index("middle") < keys.index("right")


def test_numbers_round_trip():
    _, report, _ = invoke_json("identity", "--fn", "x^2*ln(x)", "--a", "1", "--b", "2")
    _, out, _ = invoke("identity", "--fn", "x^2*ln(x)", "--a", "1", "--b", "2", "--format", "json")
    assert f'"lhs": {report["lhs"]!r}' in out or f'"lhs": {format(report["lhs"], ".17g")}' in out


@pytest.mark.parametrize(
    "argv",
    [
        ("convexity", "--fn", "x^2", "--a", "1", "--b", "3"),
        ("identity", "--fn", "x^3", "--a", "0.5", "--b", "4"),
        ("bound-powermean", "--fn", "x^2", "--a", "1", "--b", "2", "--q", "1"),
        ("bound-hoelder", "--fn", "x^2", "--a", "1", "--b", "2", "--q", "2", "--check-hypothesis"),
        ("props", "--a", "1", "--b", "2"),
        ("props", "--a", "1", "--b", "2", "--which", "3.3", "--p", "0.5"),
        ("means", "--a", "1", "--b", "2", "--p", "2"),
    ],
)
def test_holding_verdicts_exit_zero(argv):
    code, report, err = invoke_json(*argv)
    assert code == 0, err
    assert report["holds"] is True


def test_convexity_failure_prints_witness():
    code, out, err = invoke("convexity", "--fn=-x^2", "--a", "1", "--b", "2", "--format", "json")
    assert code == 1
    report = json.loads(out)
    assert report["harmonically_convex"] == "fails"
    assert report["checkers_agree"] is True
    assert report["witness_violation"] > report["tol"]
    assert err.startswith("witness: x=")


def test_concave_direction():
    code, report, _ = invoke_json("convexity", "--fn=-x^2", "--a", "1", "--b", "2", "--concave")
    assert code == 0 and report["direction"] == "concave"
    code, report, _ = invoke_json("hh", "--fn=-x^2", "--a", "1", "--b", "2", "--concave")
    assert code == 0


def test_verdict_failure_exits_one():
    code, report, _ = invoke_json("hh", "--fn=-x^2", "--a", "1", "--b", "2")
    assert code == 1 and report["holds"] is False


@pytest.mark.parametrize(
    "argv",
    [
        ("hh", "--fn", "x +", "--a", "1", "--b", "2"),
        ("hh", "--fn", "ln(x)", "--a", "-1", "--b", "2"),
        ("hh", "--fn", "ln(x)", "--a", "-2", "--b", "-1"),
        ("hh", "--fn", "x", "--a", "2", "--b", "1"),
        ("bound-hoelder", "--fn", "x", "--a", "1", "--b", "2", "--q", "1"),
        ("constants", "--a", "-2", "--b", "-1"),
        ("means", "--a", "0", "--b", "1"),
        ("props", "--a", "1", "--b", "2", "--which", "3.3", "--p", "-1"),
        ("nosuch",),
        ("hh", "--a", "1", "--b", "2"),
    ],
)
def test_errors_exit_two(argv):
    code, _, err = invoke(*argv)
    assert code == 2
    assert err


def test_determinism():
    argv = ("convexity", "--fn", "(x-1.5)^3", "--a", "1", "--b", "2", "--format", "json", "--seed", "7")
    first = invoke(*argv)
    assert first == invoke(*argv)
    other = invoke(*argv[:-1], "8")
    assert other[0] == first[0] == 1


def test_seed_from_environment(monkeypatch):
    monkeypatch.setenv("HARMONIA_SEED", "123")
    _, report, _ = invoke_json("convexity", "--fn", "x", "--a", "1", "--b", "2")
    assert report["seed"] == 123
    _, report, _ = invoke_json("convexity", "--fn", "x", "--a", "1", "--b", "2", "--seed", "5")
    assert report["seed"] == 5
    monkeypatch.setenv("HARMONIA_SEED", "abc")
    assert invoke("means", "--a", "1", "--b", "2")[0] == 2


def test_human_and_csv_formats():
    code, out, _ = invoke("means", "--a", "1", "--b", "2")
    assert code == 0 and out.splitlines()[0].split() == ["command", "means"]
    code, out, _ = invoke("props", "--a", "1", "--b", "2", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [r["proposition"] for r in rows] == ["3.1", "3.2", "3.3", "3.3", "3.3", "3.3", "3.4"]
    assert [r["p"] for r in rows if r["proposition"] == "3.3"] == ["-0.5", "0.5", "1", "2"]


def test_output_file(tmp_path):
    target = tmp_path / "report.json"
    code, out, _ = invoke("means", "--a", "1", "--b", "2", "--format", "json", "-o", str(target))
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["command"] == "means"


# -- sweep ---------------------------------------------------------------------------

JOBS = """\
# comment line
fn=x^2 a=1 b=2 q=2
fn="x^2*ln(x)" a=1 b=2.718281828459045 q=1.5

fn=x a=1 b=3 q=1
fn=1 a=0.5 b=7
fn=x^2 a=-2 b=-1   # negative interval: hh only
"""


def test_parse_job_line():
    assert parse_job_line("  # nothing") is None
    assert parse_job_line('fn="x + 1" a=1 b=2') == {"fn": "x + 1", "a": 1.0, "b": 2.0, "q": None}
    for bad in ("fn=x a=1", "fn=x a=1 b=2 z=3", "fn=x a=one b=2", 'fn="x a=1 b=2'):
        with pytest.raises(ValueError):
            parse_job_line(bad)


def test_sweep_csv(tmp_path):
    jobs = tmp_path / "jobs.txt"
    jobs.write_text(JOBS)
    code, out, err = invoke("sweep", str(jobs), "--format", "csv")
    assert code == 0, err
    reader = csv.reader(io.StringIO(out))
    header = next(reader)
    assert tuple(header) == SWEEP_HEADER
    rows = list(reader)
    assert len(rows) == 5
    assert all(r[header.index("holds")] == "true" for r in rows)
    neg = rows[-1]
    assert neg[header.index("identity_gap")] == ""


def test_sweep_parallel_is_byte_identical(tmp_path):
    jobs = tmp_path / "jobs.txt"
    jobs.write_text(JOBS)
    serial = invoke("sweep", str(jobs), "--format", "csv")
    parallel = invoke("sweep", str(jobs), "--format", "csv", "--workers", "2")
    assert serial == parallel
    assert invoke("sweep", str(jobs), "--format", "json") == invoke(
        "sweep", str(jobs), "--format", "json", "--workers", "3"
    )


def test_sweep_records_errors(tmp_path):
    jobs = tmp_path / "jobs.txt"
    jobs.write_text("fn=ln(x) a=-1 b=2\nfn=x^2 a=1 b=2\n")
    code, out, err = invoke("sweep", str(jobs), "--format", "json")
    assert code == 2
    cells = json.loads(out)["cells"]
    assert cells[0]["error"] and cells[1]["holds"] is True
    assert "ln(x)" in err


def test_sweep_missing_file(tmp_path):
    assert invoke("sweep", str(tmp_path / "missing.txt"))[0] == 2


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "harmonia", "hh", "--fn", "x", "--a", "1", "--b", "2", "--format", "json"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["holds"] is True
