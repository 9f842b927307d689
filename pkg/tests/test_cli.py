import csv
import json

import numpy as np
import pytest

from mff.cli import main, read_config_file
from mff.train import load_checkpoint


@pytest.fixture
def ramp_csv(tmp_path):
    p = tmp_path / "ramp.csv"
    rows = ["month,cci"] + [f"m{i},{100 + 3 * i}" for i in range(1, 61)]
    p.write_text("\n".join(rows) + "\n")
    return p


@pytest.fixture
def noisy_csv(tmp_path):
    r = np.random.default_rng(0)
    t = np.arange(60)
    v = 500 + 4 * t + 10 * np.sin(t / 4) + r.normal(0, 2, 60)
    p = tmp_path / "noisy.csv"
    p.write_text("t,v\n" + "\n".join(f"{i},{float(x)!r}" for i, x in enumerate(v)) + "\n")
    return p


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def train_args(path, out_dir, *extra):
    return ["train", "--input", path, "--window", 20, "--epochs", 200, "--max-lr", 1e-2,
            "--seed", 1, "--out-dir", out_dir, *extra]


def test_train_writes_artifacts(capsys, noisy_csv, tmp_path):
    out_dir = tmp_path / "run"
    code, out, _ = run(capsys, *train_args(noisy_csv, out_dir))
    assert code == 0
    ck = load_checkpoint(out_dir / "checkpoint.json")
    assert ck.config.window_size == 20 and ck.config.hidden == (8, 5)
    losses = list(csv.reader(open(out_dir / "losses.csv")))
    assert losses[0] == ["epoch", "lr", "loss"] and len(losses) == 201
    manifest = json.loads((out_dir / "manifest.json").read_text())
    assert manifest["config"]["epochs"] == 200
    assert manifest["input"]["value_column"] == "v"
    assert len(manifest["input"]["sha256"]) == 64
    assert manifest["seed"] == 1


def test_train_is_reproducible_from_manifest(capsys, noisy_csv, tmp_path):
    run(capsys, *train_args(noisy_csv, tmp_path / "a"))
    code, _, _ = run(capsys, "train", "--from-manifest", tmp_path / "a" / "manifest.json",
                     "--out-dir", tmp_path / "b")
    assert code == 0
    for name in ("checkpoint.json", "losses.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_train_missing_input(capsys):
    code, _, err = run(capsys, "train", "--epochs", 3)
    assert code == 2 and "--input" in err


def test_window_zero_is_usage_error(capsys, noisy_csv):
    with pytest.raises(SystemExit) as exc:
        main(["train", "--input", str(noisy_csv), "--window", "0"])
    assert exc.value.code == 2
    assert "--window" in capsys.readouterr().err


def test_domain_error_exit_1(capsys, noisy_csv, tmp_path):
    code, _, err = run(capsys, "train", "--input", noisy_csv, "--window", 59, "--epochs", 2,
                       "--out-dir", tmp_path)
    assert code == 1
    assert json.loads(err)["error"] == "SeriesTooShort"


def test_config_file_precedence(capsys, noisy_csv, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# experiment\nwindow_size = 20\nepochs = 7\nhidden = 4,3\nseed = 9\nstandardize_target = no\n")
    assert read_config_file(cfg)["hidden"] == (4, 3)
    code, _, _ = run(capsys, "train", "--input", noisy_csv, "--config", cfg, "--epochs", 5,
                     "--out-dir", tmp_path / "o")
    assert code == 0
    ck = load_checkpoint(tmp_path / "o" / "checkpoint.json")
    assert ck.config.epochs == 5  # flag wins
    assert ck.config.hidden == (4, 3) and ck.config.seed == 9  # file beats default
    assert ck.config.standardize_target is False
    assert ck.config.base_lr == 1e-12  # default


def test_config_file_unknown_key(capsys, noisy_csv, tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("windw = 3\n")
    code, _, err = run(capsys, "train", "--input", noisy_csv, "--config", cfg, "--out-dir", tmp_path)
    assert code == 1 and "windw" in err


def test_predict_text_and_json(capsys, noisy_csv, tmp_path):
    run(capsys, *train_args(noisy_csv, tmp_path))
    ck = tmp_path / "checkpoint.json"
    code, out, _ = run(capsys, "predict", "--checkpoint", ck, "--input", noisy_csv)
    assert code == 0
    value = float(out.strip())
    code, out, _ = run(capsys, "predict", "--checkpoint", ck, "--input", noisy_csv, "--format", "json")
    d = json.loads(out)
    assert d["prediction"] == value
    assert list(d["features"]) == ["index", "mean", "std", "distance", "apen", "vg_degree"]
    assert d["ordinal"] == 60 - 20 + 1


def test_predict_constant_series(capsys, tmp_path):
    p = tmp_path / "c.csv"
    p.write_text("t,v\n" + "\n".join(f"{i},7.5" for i in range(30)) + "\n")
    run(capsys, "train", "--input", p, "--window", 10, "--epochs", 2000, "--max-lr", 1e-2,
        "--out-dir", tmp_path)
    code, out, _ = run(capsys, "predict", "--checkpoint", tmp_path / "checkpoint.json", "--input", p)
    assert code == 0 and abs(float(out) - 7.5) < 1e-2


def test_predict_series_too_short(capsys, noisy_csv, tmp_path):
    run(capsys, *train_args(noisy_csv, tmp_path))
    short = tmp_path / "short.csv"
    short.write_text("t,v\n1,2\n2,3\n")
    code, _, err = run(capsys, "predict", "--checkpoint", tmp_path / "checkpoint.json", "--input", short)
    assert code == 1 and json.loads(err)["error"] == "SeriesTooShort"


def test_evaluate(capsys, noisy_csv, tmp_path):
    run(capsys, *train_args(noisy_csv, tmp_path))
    preds = tmp_path / "preds.csv"
    code, out, _ = run(capsys, "evaluate", "--checkpoint", tmp_path / "checkpoint.json",
                       "--input", noisy_csv, "--output", preds, "--table-csv", tmp_path / "row.csv")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0].split() == ["method", "MAD", "MAPE", "SMAPE", "RMSE", "NRMSE"]
    assert lines[1].startswith("MFF(8,5)")
    rows = list(csv.reader(open(preds)))
    # 60 points, window 20 -> 40 examples, 32 train, 8 test
    assert rows[0] == ["t", "y", "yhat"] and len(rows) == 9
    assert rows[1][0] == "52"  # position 53 carries the label t=52
    assert all(np.isfinite(float(x)) for r in rows[1:] for x in r[1:])


def test_evaluate_mismatched_series(capsys, noisy_csv, tmp_path):
    run(capsys, *train_args(noisy_csv, tmp_path))
    short = tmp_path / "short.csv"
    short.write_text("t,v\n" + "\n".join(f"{i},{i}" for i in range(40)) + "\n")
    code, _, err = run(capsys, "evaluate", "--checkpoint", tmp_path / "checkpoint.json", "--input", short)
    assert code == 1 and json.loads(err)["error"] == "RangeOutOfBounds"


def _bench_rows(path):
    return {r[0]: r[1:] for r in list(csv.reader(open(path)))[1:]}


def test_bench_ramp(capsys, ramp_csv, tmp_path):
    out_csv = tmp_path / "bench.csv"
    code, out, _ = run(capsys, "bench", "--input", ramp_csv, "--window", 20, "--epochs", 50,
                       "--output", out_csv)
    assert code == 0
    rows = _bench_rows(out_csv)
    assert list(rows) == ["MFF(8,5)", "Naive", "SMA(K=1)", "OLS trend"]
    ols_mad = float(rows["OLS trend"][0])
    assert ols_mad < 1e-9
    assert all(float(r[0]) > ols_mad for name, r in rows.items() if name != "OLS trend")


def test_bench_constant(capsys, tmp_path):
    p = tmp_path / "c.csv"
    p.write_text("t,v\n" + "\n".join(f"{i},4.25" for i in range(40)) + "\n")
    out_csv = tmp_path / "bench.csv"
    code, _, _ = run(capsys, "bench", "--input", p, "--window", 10, "--epochs", 5,
                     "--methods", "naive,sma", "--sma-k", 3, "--output", out_csv)
    assert code == 0
    rows = _bench_rows(out_csv)
    assert list(rows) == ["Naive", "SMA(K=3)"]
    for r in rows.values():
        assert float(r[0]) == 0.0 and float(r[3]) == 0.0
        assert r[4] == "undefined"


def test_bench_with_checkpoint(capsys, noisy_csv, tmp_path):
    run(capsys, *train_args(noisy_csv, tmp_path))
    code, out, _ = run(capsys, "bench", "--input", noisy_csv, "--checkpoint", tmp_path / "checkpoint.json")
    assert code == 0 and len(out.strip().splitlines()) == 5


def test_bench_unknown_method(capsys, noisy_csv):
    code, _, err = run(capsys, "bench", "--input", noisy_csv, "--methods", "arima")
    assert code == 2


def test_features(capsys, tmp_path):
    r = np.random.default_rng(1)
    p = tmp_path / "cci.csv"
    p.write_text("t,v\n" + "\n".join(f"{i},{4000 + 10 * i + r.normal()!r}" for i in range(295)) + "\n")
    out, scaler = tmp_path / "f.csv", tmp_path / "s.json"
    code, _, _ = run(capsys, "features", "--input", p, "--window", 180, "--output", out, "--scaler-out", scaler)
    assert code == 0
    rows = list(csv.reader(open(out)))
    assert rows[0] == ["index", "mean", "std", "distance", "apen", "vg_degree"]
    assert len(rows) == 117 and all(len(r) == 6 for r in rows)
    s = json.loads(scaler.read_text())
    assert s["train_rows"] == 92 and len(s["mean"]) == 6 and len(s["std"]) == 6
    # full-precision output
    assert float(rows[1][1]) == pytest.approx(np.mean([float(x) for x in p.read_text().split()[1:181] for x in [x.split(",")[1]]]), rel=1e-15)


def test_features_window_too_large(capsys, noisy_csv, tmp_path):
    code, _, err = run(capsys, "features", "--input", noisy_csv, "--window", 61, "--output", tmp_path / "f.csv")
    assert code == 1 and json.loads(err)["error"] == "WindowTooLarge"


def test_missing_file(capsys, tmp_path):
    code, _, err = run(capsys, "features", "--input", tmp_path / "none.csv", "--output", tmp_path / "f.csv")
    assert code == 1 and json.loads(err)["error"] == "MissingFile"


def test_non_numeric(capsys, tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("t,v\n1,abc\n")
    code, _, err = run(capsys, "features", "--input", p, "--output", tmp_path / "f.csv")
    assert code == 1 and json.loads(err)["error"] == "NonNumericValue"
