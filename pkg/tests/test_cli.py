import csv
import io
import json
import subprocess
import sys

import pytest

from wulffkit import cli
from wulffkit.cli import RunConfig, UsageError, main, run, trial_seed
from wulffkit.errors import SolverFailure
from wulffkit.reports import InequalityReport


def verify(capsys, *args):
    code = main(["verify", *args])
    out = capsys.readouterr()
    return code, out.out, out.err


# --- configuration -----------------------------------------------------------


@pytest.mark.parametrize(
    "kwargs",
    [dict(dim=1), dict(dim=6), dict(trials=0), dict(seed=-1), dict(seed=2**64), dict(eq_tol=0.0), dict(solver_tol=-1.0)],
)
def test_config_validation(kwargs):
    with pytest.raises(UsageError):
        RunConfig("wulff", **kwargs).validate()


def test_trial_seeds_distinct():
    seeds = {trial_seed(7, s, t) for s in cli.SUITES for t in range(50)}
    assert len(seeds) == 50 * len(cli.SUITES)
    assert trial_seed(7, "wulff", 3) == trial_seed(7, "wulff", 3)


# --- suites ------------------------------------------------------------------


@pytest.mark.parametrize("dim", [2, 3])
def test_extremals(capsys, dim):
    code, out, _ = verify(capsys, "extremals", "--dim", str(dim))
    assert code == 0
    body = json.loads(out)
    names = {r["name"] for r in body["reports"]}
    assert {"thm_1", "thm_5_1", "thm_2", "thm_3_1", "thm_3_2"} <= names
    assert all(r["equality"] for r in body["reports"])
    assert body["summary"]["equality_count"] == len(body["reports"])


def test_wulff_batch(capsys):
    code, out, err = verify(capsys, "wulff", "--dim", "2", "--trials", "40", "--seed", "7")
    assert code == 0
    body = json.loads(out)
    assert len(body["reports"]) == 80
    assert body["summary"]["min_gap"] > 0
    assert "wulff: 80 reports" in err


@pytest.mark.parametrize("suite", ["even-wulff", "ball-barthe", "transport", "corollaries"])
def test_other_suites_pass(capsys, suite):
    code, out, _ = verify(capsys, suite, "--dim", "2", "--trials", "5", "--seed", "1")
    assert code == 0, json.loads(out)["summary"]
    assert json.loads(out)["summary"]["failures"] == []


def test_corollaries_csv(capsys):
    code, out, _ = verify(capsys, "corollaries", "--dim", "2", "--trials", "3", "--seed", "3", "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert {r["meta.trial"] for r in rows} == {"0", "1", "2"}
    assert all(r["meta.suite"] == "corollaries" for r in rows)
    assert len({(r["meta.trial"], r["name"]) for r in rows}) == len(rows)


def test_out_file(tmp_path, capsys):
    path = tmp_path / "rep.json"
    code, out, _ = verify(capsys, "extremals", "--out", str(path))
    assert code == 0 and out == ""
    assert json.loads(path.read_text())["summary"]["failures"] == []


# --- determinism -------------------------------------------------------------


def _json_without_time(monkeypatch, threads, suite="wulff"):
    monkeypatch.setenv("WULFFKIT_THREADS", str(threads))
    rep, _ = run(RunConfig(suite, dim=2, trials=20, seed=11))
    return rep.to_json(timing=False)


def test_deterministic_across_threads(monkeypatch):
    for suite in ("wulff", "ball-barthe"):
        assert _json_without_time(monkeypatch, 1, suite) == _json_without_time(monkeypatch, 4, suite)


def test_seed_changes_output(monkeypatch):
    monkeypatch.setenv("WULFFKIT_THREADS", "1")
    a, _ = run(RunConfig("wulff", trials=3, seed=1))
    b, _ = run(RunConfig("wulff", trials=3, seed=2))
    assert a.to_json(timing=False) != b.to_json(timing=False)


# --- exit codes --------------------------------------------------------------


def test_violation_forces_exit_1(monkeypatch, capsys):
    def broken(cfg, fixed, trial, s):
        return [InequalityReport.upper("fake", 2.0, 1.0, 1e-9, gap_tol=1e-9)]

    monkeypatch.setitem(cli._SUITE_FNS, "wulff", broken)
    code, out, _ = verify(capsys, "wulff", "--trials", "2")
    assert code == 1
    assert len(json.loads(out)["summary"]["failures"]) == 2


def test_solver_failure_forces_exit_1(monkeypatch):
    def failing(cfg, fixed, trial, s):
        raise SolverFailure("did not converge")

    monkeypatch.setitem(cli._SUITE_FNS, "corollaries", failing)
    rep, code = run(RunConfig("corollaries", trials=2))
    assert code == 1
    assert "SolverFailure" in rep.summary["failures"][0]["reason"]


@pytest.mark.parametrize(
    "args",
    [
        ["verify", "wulff", "--dim", "7"],
        ["verify", "nonsense"],
        ["verify", "wulff", "--eq-tol", "-1"],
        ["verify", "wulff", "--trials", "0"],
        ["verify", "wulff", "--format", "xml"],
        ["frobnicate"],
    ],
)
def test_usage_errors_exit_2(args):
    try:
        code = main(args)
    except SystemExit as exc:
        code = exc.code
    assert code == 2


def test_bad_thread_count(monkeypatch, capsys):
    monkeypatch.setenv("WULFFKIT_THREADS", "many")
    code, _, err = verify(capsys, "extremals")
    assert code == 2 and "WULFFKIT_THREADS" in err


# --- measure files -----------------------------------------------------------


def test_generate_and_verify_measure(tmp_path, capsys):
    path = tmp_path / "simplex.json"
    assert main(["generate", "simplex", "--dim", "3", "--out", str(path)]) == 0
    code, out, _ = verify(capsys, "wulff", "--dim", "3", "--measure", str(path))
    assert code == 0
    reps = json.loads(out)["reports"]
    assert len(reps) == 2 and all(r["equality"] for r in reps)


def test_measure_mode_rejects_odd_measure_for_even_suite(tmp_path, capsys):
    path = tmp_path / "simplex.json"
    main(["generate", "simplex", "--out", str(path)])
    code, _, err = verify(capsys, "even-wulff", "--measure", str(path))
    assert code == 2 and "hypotheses" in err


def test_measure_mode_bad_file(tmp_path, capsys):
    path = tmp_path / "bad.json"
    main(["generate", "cube", "--out", str(path)])
    d = json.loads(path.read_text())
    d["weights"][1] = -1.0
    path.write_text(json.dumps(d))
    code, _, err = verify(capsys, "even-wulff", "--measure", str(path))
    assert code == 2 and "weights[1]" in err
    code, _, err = verify(capsys, "wulff", "--dim", "3", "--measure", str(path))
    assert code == 2


def test_generate_random_even(tmp_path):
    path = tmp_path / "even.json"
    assert main(["generate", "random-even", "--dim", "3", "--seed", "4", "--out", str(path)]) == 0
    assert main(["verify", "even-wulff", "--dim", "3", "--measure", str(path), "--out", str(tmp_path / "r.json")]) == 0


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "wulffkit", "verify", "extremals", "--dim", "2"],
        capture_output=True, text=True, timeout=120,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["summary"]["equality_mismatches"] == []
