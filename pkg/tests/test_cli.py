import csv
import json
import math
import subprocess
import sys

import pytest

from qxent.cli import main


def _read(path):
    return path.read_bytes()


def test_check_exit_zero_and_reports(tmp_path):
    out = tmp_path / "run"
    code = main(["check", "--suite", "all", "--dim", "2", "--trials", "20", "--seed", "7",
                 "--out", str(out)])
    assert code == 0
    report = json.loads((out / "check_report.json").read_text())
    assert report["all_pass"] and report["seed"] == 7
    lines = (out / "check_report.csv").read_text().splitlines()
    assert lines[0] == "# artifact=qxent 0.1.0"
    header = next(l for l in lines if not l.startswith("#"))
    assert header == "check_id,trials,worst_margin,tolerance,pass,witness_ref"


def test_counterexample_suite_has_scalars(tmp_path):
    out = tmp_path / "x"
    assert main(["check", "--suite", "povm-counterexample", "--seed", "0", "--out", str(out)]) == 0
    report = json.loads((out / "check_report.json").read_text())
    (check,) = report["checks"]
    values = check["witness"]["values"]
    assert abs(values["tr_rho2_log_sigma"] - math.log(2 / 3)) <= 1e-12
    assert abs(values["log_prob2"] - math.log(1 / 3)) <= 1e-12


def test_counterexample_command(tmp_path, capsys):
    out = tmp_path / "c"
    assert main(["counterexample", "--out", str(out)]) == 0
    assert "PASS" in capsys.readouterr().out
    assert (out / "counterexample_report.csv").exists()


@pytest.mark.parametrize("body", ["seed: 1\nbogus: 2\n", "seed: [1\n", "- 1\n- 2\n",
                                  "seed: 1\ndim: two\n", "seed: 1\nsuite: nope\n"])
def test_malformed_config_exit_two_nothing_written(tmp_path, body):
    cfg = tmp_path / "bad.yaml"
    cfg.write_text(body)
    out = tmp_path / "never"
    assert main(["check", "--config", str(cfg), "--out", str(out)]) == 2
    assert not out.exists()


def test_missing_seed_and_bad_flags(tmp_path):
    assert main(["check", "--out", str(tmp_path / "a")]) == 2
    assert main(["check", "--seed", "x"]) == 2
    assert main(["frobnicate"]) == 2
    assert not (tmp_path / "a").exists()


def test_config_file_and_env_override(tmp_path, monkeypatch):
    cfg = tmp_path / "run.yaml"
    cfg.write_text("seed: 5\ndim: 3\ntrials: 10\nsuite: [lemma-a1, lemma-a2]\nout: ignored\n")
    monkeypatch.setenv("QXENT_OUT", str(tmp_path / "env"))
    assert main(["check", "--config", str(cfg), "--trials", "12"]) == 0
    report = json.loads((tmp_path / "env" / "check_report.json").read_text())
    assert report["config"]["dim"] == 3 and report["config"]["trials"] == 12
    assert [c["check_id"] for c in report["checks"]] == ["lemma-a1", "lemma-a2"]


def test_json_config_accepted(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"seed": 2, "dim": 2, "trials": 5, "suite": "theorem1"}))
    assert main(["check", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 0


def test_parallel_reports_byte_identical(tmp_path):
    outs = []
    for n in (1, 8):
        out = tmp_path / f"p{n}"
        assert main(["check", "--dim", "3", "--trials", "30", "--seed", "11",
                     "--parallel", str(n), "--out", str(out)]) == 0
        outs.append(out)
    for name in ("check_report.csv", "check_report.json"):
        assert _read(outs[0] / name) == _read(outs[1] / name)


def test_tomography_command(tmp_path):
    out = tmp_path / "t"
    assert main(["tomography", "--seed", "3", "--dim", "2", "--shots", "2000", "--out", str(out)]) == 0
    report = json.loads((out / "tomography_report.json").read_text())
    rows = {r["estimator"]: r for r in report["estimators"]}
    assert rows["min_cross_entropy"]["trace_distance"] < 1e-4
    assert rows["max_likelihood"]["trace_distance"] < 0.1
    assert (out / "dataset.csv").exists() and (out / "dataset.jsonl").exists()


def test_tomography_incomplete_measurement(tmp_path):
    cfg = tmp_path / "t.yaml"
    cfg.write_text("seed: 1\ndim: 2\nmeasurement: computational\n")
    assert main(["tomography", "--config", str(cfg), "--out", str(tmp_path / "t")]) == 2
    assert not (tmp_path / "t").exists()


def test_bounds_command(tmp_path):
    out = tmp_path / "b"
    assert main(["bounds", "--seed", "1", "--dim", "4", "--trials", "50", "--out", str(out)]) == 0
    lines = [l for l in (out / "bounds.csv").read_text().splitlines() if not l.startswith("#")]
    assert lines[0].startswith("trial,rank_rho,S,")
    assert len(lines) == 51


def _bounds_rows(out):
    lines = [l for l in (out / "bounds.csv").read_text().splitlines() if not l.startswith("#")]
    return list(csv.DictReader(lines))


def test_bits_flag_scales_entropies(tmp_path):
    runs = {}
    for flag in ([], ["--bits"]):
        out = tmp_path / ("bits" if flag else "nats")
        assert main(["bounds", "--seed", "1", "--dim", "2", "--trials", "3", "--out", str(out)]
                    + flag) == 0
        runs[bool(flag)] = _bounds_rows(out)
    for nats, bits in zip(runs[False], runs[True]):
        assert abs(float(bits["S"]) - float(nats["S"]) / math.log(2)) < 1e-12


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "qxent", "counterexample", "--out", str(tmp_path)],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "PASS" in proc.stdout
