import json

import numpy as np
import pytest

from conftest import make_regression, make_binary, write_csv
from frugalml.cli import run


def test_fit_smoke_regression(tmp_path, capsys):
    train = write_csv(tmp_path / "d.csv", make_regression(300, seed=0))
    log = tmp_path / "t.jsonl"
    code = run([
        "fit", "--train", str(train), "--task", "regression",
        "--metric", "one_minus_r2", "--budget-secs", "5", "--seed", "1",
        "--log", str(log), "--max-trials", "5",
    ])
    assert code == 0
    assert log.exists() and log.stat().st_size > 0
    assert (tmp_path / "t.png").exists()
    summary = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
    assert summary["metric"] == "one_minus_r2"
    assert summary["n_trials"] == 5
    assert "config" in summary


def test_fit_missing_train_is_usage_error(tmp_path):
    code = run(["fit", "--task", "regression", "--budget-secs", "5"])
    assert code != 0


def test_unknown_flag_exits_nonzero():
    with pytest.raises(SystemExit) as exc:
        run(["fit", "--nonsense", "1"])
    assert exc.value.code != 0


def test_missing_file_reports_cleanly(tmp_path, capsys):
    code = run([
        "fit", "--train", str(tmp_path / "absent.csv"), "--task", "regression",
        "--budget-secs", "2", "--log", str(tmp_path / "t.jsonl"),
    ])
    assert code == 1
    assert "error:" in capsys.readouterr().err


def test_fit_with_test_file_and_summary(tmp_path, capsys):
    data = make_binary(400, seed=1)
    train = write_csv(tmp_path / "train.csv", data)
    test = write_csv(tmp_path / "test.csv", make_binary(100, seed=2))
    summary_path = tmp_path / "s.json"
    code = run([
        "fit", "--train", str(train), "--task", "binary",
        "--budget-secs", "5", "--seed", "0", "--log", str(tmp_path / "t.jsonl"),
        "--test", str(test), "--summary", str(summary_path),
        "--max-trials", "4", "--no-figure",
    ])
    assert code == 0
    summary = json.loads(summary_path.read_text())
    assert "test_error" in summary and 0 <= summary["test_error"] <= 1
    assert summary["learner"] in ("gbt", "rf", "lr")


def test_predict_roundtrip(tmp_path):
    data = make_regression(200, seed=3)
    train = write_csv(tmp_path / "train.csv", data)
    summary_path = tmp_path / "s.json"
    assert run([
        "fit", "--train", str(train), "--task", "regression",
        "--budget-secs", "4", "--log", str(tmp_path / "t.jsonl"),
        "--summary", str(summary_path), "--max-trials", "3", "--no-figure",
    ]) == 0
    feats = tmp_path / "X.csv"
    with feats.open("w") as fh:
        fh.write(",".join(f"f{i}" for i in range(data.n_features)) + "\n")
        for row in data.features[:10]:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")
    out = tmp_path / "preds.csv"
    assert run([
        "predict", "--summary", str(summary_path), "--train", str(train),
        "--features", str(feats), "--out", str(out),
    ]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "prediction"
    assert len(lines) == 11
    float(lines[1])  # parses


def test_predict_classification_probabilities(tmp_path):
    data = make_binary(300, seed=4)
    train = write_csv(tmp_path / "train.csv", data)
    summary_path = tmp_path / "s.json"
    assert run([
        "fit", "--train", str(train), "--task", "binary",
        "--budget-secs", "4", "--log", str(tmp_path / "t.jsonl"),
        "--summary", str(summary_path), "--max-trials", "3", "--no-figure",
        "--learners", "gbt",
    ]) == 0
    feats = tmp_path / "X.csv"
    with feats.open("w") as fh:
        fh.write(",".join(f"f{i}" for i in range(data.n_features)) + "\n")
        for row in data.features[:5]:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")
    out = tmp_path / "preds.csv"
    assert run([
        "predict", "--summary", str(summary_path), "--train", str(train),
        "--features", str(feats), "--out", str(out),
    ]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "prediction,p0,p1"
    cells = lines[1].split(",")
    assert cells[0] in ("0", "1")
    assert float(cells[1]) + float(cells[2]) == pytest.approx(1.0)


def test_replay_writes_curves_and_figure(tmp_path):
    out_dir = tmp_path / "curves"
    code = run([
        "replay", "--policies", "flaml,roundrobin,fulldata,cv",
        "--budget", "1000", "--seed", "3", "--out-dir", str(out_dir),
    ])
    assert code == 0
    files = sorted(p.name for p in out_dir.iterdir())
    assert files == [
        "curve_cv.csv", "curve_flaml.csv", "curve_fulldata.csv",
        "curve_roundrobin.csv", "curves.png",
    ]
    header = (out_dir / "curve_flaml.csv").read_text().splitlines()[0]
    assert header == "elapsed,best_error"


def test_replay_deterministic_bytes(tmp_path):
    a_dir, b_dir = tmp_path / "a", tmp_path / "b"
    for d in (a_dir, b_dir):
        assert run([
            "replay", "--policies", "flaml,random", "--budget", "800",
            "--seed", "9", "--out-dir", str(d), "--no-figure",
        ]) == 0
    for name in ("curve_flaml.csv", "curve_random.csv"):
        assert (a_dir / name).read_bytes() == (b_dir / name).read_bytes()


def test_replay_unknown_policy(tmp_path, capsys):
    code = run(["replay", "--policies", "nope", "--budget", "10",
                "--out-dir", str(tmp_path)])
    assert code == 1
    assert "unknown policy" in capsys.readouterr().err


def test_surrogate_fit_cli_deterministic(tmp_path):
    logs = []
    for name in ("a.jsonl", "b.jsonl"):
        log = tmp_path / name
        assert run([
            "fit", "--surrogate", "default", "--budget-secs", "2000",
            "--seed", "5", "--log", str(log), "--no-figure",
        ]) == 0
        logs.append(log.read_bytes())
    assert logs[0] == logs[1]
