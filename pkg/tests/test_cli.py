"""End-to-end tests for the command-line pipeline (generate/run/report/verify)."""

import json
import subprocess

import numpy as np
import pytest

from vertipy import cli, storage, verify
from vertipy.feasibility import SUPERIORIZED_ALGORITHMS
from vertipy.verify import CheckResult


def _generate(out, count=4, seed=7, extra=()):
    rc = cli.main(
        ["generate", "--out", str(out), "--seed", str(seed), "--count", str(count)]
        + list(extra)
    )
    assert rc == 0
    return out


def test_generate_writes_batch(tmp_path, capsys):
    out = _generate(tmp_path / "batch")
    files = sorted((out / "problems").glob("*.json"))
    assert [f.name for f in files] == [f"p{i:04d}.json" for i in range(4)]
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["seed"] == 7
    assert manifest["count"] == 4
    assert manifest["nonconvex"] is False
    assert manifest["problems"][0]["file"] == "problems/p0000.json"
    assert isinstance(manifest["problems"][0]["seed"], int)
    assert "wrote 4 problem(s)" in capsys.readouterr().out


def test_generate_nonconvex_flag(tmp_path):
    out = _generate(tmp_path, count=1, extra=["--nonconvex"])
    problem = storage.load_problem(out / "problems" / "p0000.json")
    assert problem.meta["nonconvex"] is True

    convex = storage.load_problem(_generate(tmp_path / "c", count=1) / "problems" / "p0000.json")
    assert convex.meta["nonconvex"] is False


def test_run_requires_problems(tmp_path, capsys):
    assert cli.main(["run", "--out", str(tmp_path / "nowhere")]) == 1
    assert "does not exist" in capsys.readouterr().err

    empty = tmp_path / "empty"
    empty.mkdir()
    assert cli.main(["run", "--out", str(empty)]) == 1
    assert "no problem files" in capsys.readouterr().err


def test_report_requires_records(tmp_path, capsys):
    out = _generate(tmp_path, count=1)
    assert cli.main(["report", "--out", str(out)]) == 1
    assert "no records" in capsys.readouterr().err


def test_pipeline_run_and_report(tmp_path):
    out = _generate(tmp_path)
    rc = cli.main(["run", "--out", str(out), "--algorithms", "CycP,ParP"])
    assert rc == 0

    lines = (out / "records.jsonl").read_text().strip().splitlines()
    keys = [(json.loads(l)["algorithm"], json.loads(l)["problem_id"]) for l in lines]
    assert len(keys) == 8
    assert keys == sorted(keys)  # rewritten in sorted order

    rc = cli.main(["report", "--out", str(out)])
    assert rc == 0
    for name in ("profiles.csv", "proximity.csv", "delta.csv", "summary.txt"):
        assert (out / name).exists()
    delta = (out / "delta.csv").read_text().strip().splitlines()
    assert delta[0].startswith("algorithm,")
    assert {row.split(",")[0] for row in delta[1:]} == {"CycP", "ParP"}
    summary = (out / "summary.txt").read_text()
    assert "solved fraction per algorithm:" in summary
    assert "problems: 4" in summary


def test_run_resume_skips_finished(tmp_path, capsys):
    out = _generate(tmp_path, count=2)
    assert cli.main(["run", "--out", str(out), "--algorithms", "CycP"]) == 0
    first = (out / "records.jsonl").read_bytes()
    capsys.readouterr()

    assert cli.main(["run", "--out", str(out), "--algorithms", "CycP"]) == 0
    assert "resuming: 2 finished pair(s) found, 0 to go" in capsys.readouterr().out
    assert (out / "records.jsonl").read_bytes() == first  # nothing re-ran


def test_csv_outputs_deterministic(tmp_path):
    # identical seeds through the whole pipeline give byte-identical reports
    outs = []
    for sub in ("a", "b"):
        out = _generate(tmp_path / sub, count=3, seed=11)
        assert cli.main(["run", "--out", str(out), "--algorithms", "CycP,SaP"]) == 0
        assert cli.main(["report", "--out", str(out)]) == 0
        outs.append(out)
    for name in ("profiles.csv", "proximity.csv", "delta.csv", "summary.txt"):
        assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes()


def test_parallel_jobs_match_sequential(tmp_path):
    recs = {}
    for jobs, sub in (("1", "seq"), ("2", "par")):
        out = _generate(tmp_path / sub, count=2, seed=3)
        rc = cli.main(
            ["run", "--out", str(out), "--algorithms", "CycP", "--jobs", jobs]
        )
        assert rc == 0
        recs[sub] = storage.read_records(out / "records.jsonl")
    for a, b in zip(recs["seq"], recs["par"]):
        assert (a.algorithm, a.problem_id) == (b.algorithm, b.problem_id)
        assert a.iterations == b.iterations
        assert a.converged == b.converged
        assert np.array_equal(a.final, b.final)
        assert np.array_equal(a.d_trace, b.d_trace)


def test_mode_selects_family(tmp_path):
    out = _generate(tmp_path, count=1)
    rc = cli.main(["run", "--out", str(out), "--mode", "super", "--k-max", "500"])
    assert rc == 0
    records = storage.read_records(out / "records.jsonl")
    assert {r.algorithm for r in records} == set(SUPERIORIZED_ALGORITHMS)


def test_unknown_algorithm_rejected(tmp_path, capsys):
    out = _generate(tmp_path, count=1)
    assert cli.main(["run", "--out", str(out), "--algorithms", "Nope"]) == 1
    assert "unknown algorithm(s): Nope" in capsys.readouterr().err


def test_usage_errors_exit_1(tmp_path, monkeypatch, capsys):
    monkeypatch.chdir(tmp_path)  # keep default --out away from the repo
    assert cli.main([]) == 1
    assert cli.main(["run", "--bogus-flag"]) == 1
    assert cli.main(["generate", "--count", "0", "--out", str(tmp_path)]) == 1
    capsys.readouterr()


def test_option_precedence(tmp_path, monkeypatch):
    config = tmp_path / "conf.json"
    config.write_text(json.dumps({"count": 2}))
    monkeypatch.setenv("VERTIPY_COUNT", "3")

    # flag > environment > config file
    flag = tmp_path / "flag"
    assert cli.main(
        ["generate", "--out", str(flag), "--config", str(config), "--count", "4"]
    ) == 0
    assert len(list((flag / "problems").glob("*.json"))) == 4

    env = tmp_path / "env"
    assert cli.main(["generate", "--out", str(env), "--config", str(config)]) == 0
    assert len(list((env / "problems").glob("*.json"))) == 3

    monkeypatch.delenv("VERTIPY_COUNT")
    conf = tmp_path / "conf"
    assert cli.main(["generate", "--out", str(conf), "--config", str(config)]) == 0
    assert len(list((conf / "problems").glob("*.json"))) == 2


def test_bad_config_rejected(tmp_path, capsys):
    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    assert cli.main(["generate", "--out", str(tmp_path), "--config", str(broken)]) == 1
    assert "cannot read config" in capsys.readouterr().err

    listy = tmp_path / "list.json"
    listy.write_text("[1, 2]")
    assert cli.main(["generate", "--out", str(tmp_path), "--config", str(listy)]) == 1
    assert "must hold a JSON object" in capsys.readouterr().err


def test_bad_boolean_env_rejected(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("VERTIPY_NONCONVEX", "maybe")
    assert cli.main(["generate", "--out", str(tmp_path), "--count", "1"]) == 1
    assert "invalid boolean" in capsys.readouterr().err


def test_verify_all_checks_pass(capsys):
    assert cli.main(["verify"]) == 0
    out = capsys.readouterr().out
    assert out.count("PASS ") == len(verify.ALL_CHECKS)
    assert "FAIL" not in out
    assert f"all {len(verify.ALL_CHECKS)} check(s) passed" in out


def test_verify_subset_and_unknown(capsys):
    assert cli.main(["verify", "--checks", "dr-cycling"]) == 0
    out = capsys.readouterr().out
    assert out.count("PASS ") == 1 and "dr-cycling" in out

    assert cli.main(["verify", "--checks", "bogus"]) == 1
    assert "unknown check(s): bogus" in capsys.readouterr().err


def test_verify_failure_exits_2(monkeypatch, capsys):
    # fault injection: a failing check must be reported loudly, not masked
    def broken():
        return CheckResult("disk-line-gap", False, 1.0, 1e-6, "injected failure")

    monkeypatch.setitem(verify.ALL_CHECKS, "disk-line-gap", broken)
    assert cli.main(["verify"]) == 2
    out = capsys.readouterr().out
    assert "FAIL disk-line-gap: injected failure" in out
    assert f"1 of {len(verify.ALL_CHECKS)} check(s) failed" in out


def test_console_script_runs():
    proc = subprocess.run(
        ["vertipy", "verify", "--checks", "dykstra-halving"],
        capture_output=True,
        text=True,
        timeout=120,
    )
    assert proc.returncode == 0, proc.stderr
    assert "PASS dykstra-halving" in proc.stdout
