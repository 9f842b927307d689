"""Command-line front end: ``mff train | predict | evaluate | bench | features``.

Exit codes: 0 on success, 1 on a domain or runtime error (a one-line JSON
object with ``error`` and ``message`` goes to stderr), 2 on usage errors.
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import hashlib
import json
import os
import sys
from dataclasses import fields
from importlib import metadata

from . import metrics
from .errors import MFFError
from .features import build_feature_matrix, default_function_sequence, fit_standardize
from .series import load_series, make_supervised, sliding_window, split_point
from .train import (
    TrainConfig,
    evaluate_walk_forward,
    final_features,
    load_checkpoint,
    predict_next,
    save_checkpoint,
    train_mff,
    write_loss_history,
)

CONFIG_KEYS = {f.name: f for f in fields(TrainConfig)}

# flag dest -> TrainConfig field
FLAG_TO_KEY = {
    "window": "window_size",
    "hidden": "hidden",
    "epochs": "epochs",
    "base_lr": "base_lr",
    "max_lr": "max_lr",
    "step_up": "step_size_up",
    "step_down": "step_size_down",
    "split": "train_fraction",
    "seed": "seed",
    "activation": "activation",
    "batch_mode": "batch_mode",
    "grad_clip": "grad_clip",
    "apen_m": "apen_m",
    "apen_r_factor": "apen_r_factor",
    "beta1": "beta1",
    "beta2": "beta2",
    "eps": "eps",
    "standardize_features": "standardize_features",
    "standardize_target": "standardize_target",
}


def _version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "0+unknown"


# ---------------------------------------------------------------- arg types


def positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {text!r}")
    return v


def positive_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"must be a positive number, got {text!r}") from None
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be a positive number, got {text!r}")
    return v


def fraction(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"must be a number in (0, 1), got {text!r}") from None
    if not 0.0 < v < 1.0:
        raise argparse.ArgumentTypeError(f"must be a number in (0, 1), got {text!r}")
    return v


def hidden_sizes(text: str) -> tuple:
    parts = text.replace(" ", "").split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected two sizes like 8,5, got {text!r}")
    return tuple(positive_int(p) for p in parts)


# ------------------------------------------------------------- config files


def _parse_scalar(key: str, raw: str):
    raw = raw.strip()
    if raw.lower() in ("none", "null", ""):
        return None
    if key == "hidden":
        return hidden_sizes(raw)
    if key in ("standardize_features", "standardize_target"):
        if raw.lower() in ("1", "true", "yes", "on"):
            return True
        if raw.lower() in ("0", "false", "no", "off"):
            return False
        raise ValueError(f"{key}: expected a boolean, got {raw!r}")
    if key in ("activation", "batch_mode"):
        return raw
    if key in ("window_size", "apen_m", "epochs", "step_size_up", "step_size_down", "seed"):
        return int(raw)
    return float(raw)


def read_config_file(path) -> dict:
    """Parse ``key = value`` lines (``#`` starts a comment) into config fields."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key = value")
            key, raw = (s.strip() for s in line.split("=", 1))
            if key not in CONFIG_KEYS:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            out[key] = _parse_scalar(key, raw)
    return out


def resolve_config(args) -> TrainConfig:
    """Flags override the config file (or manifest), which overrides defaults."""
    values = {}
    manifest = getattr(args, "from_manifest", None)
    if manifest:
        with open(manifest, encoding="utf-8") as fh:
            values.update(json.load(fh)["config"])
    if getattr(args, "config", None):
        values.update(read_config_file(args.config))
    for flag, key in FLAG_TO_KEY.items():
        if hasattr(args, flag):
            values[key] = getattr(args, flag)
    return TrainConfig.from_dict(values)


def _sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def _csv_header(path) -> list:
    with open(path, newline="", encoding="utf-8") as fh:
        return [h.strip() for h in next(csv.reader(fh), [])]


def _load(args):
    """Load the input series, defaulting to the last column for values."""
    value_col, ts_col = args.value_column, args.timestamp_column
    if not os.path.isfile(args.input):
        return load_series(args.input, value_col or "")
    header = _csv_header(args.input)
    if value_col is None and header:
        value_col = header[-1]
    if ts_col is None and len(header) >= 2 and header[0] != value_col:
        ts_col = header[0]
    args.value_column, args.timestamp_column = value_col, ts_col
    return load_series(args.input, value_col, ts_col)


def _num(x) -> str:
    return repr(float(x))


def _write_json(path, obj) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=1)
        fh.write("\n")


# ----------------------------------------------------------------- commands


def cmd_train(args) -> int:
    if args.from_manifest and args.input is None:
        with open(args.from_manifest, encoding="utf-8") as fh:
            inp = json.load(fh)["input"]
        args.input = inp["path"]
        args.value_column = args.value_column or inp.get("value_column")
        args.timestamp_column = args.timestamp_column or inp.get("timestamp_column")
    if args.input is None:
        print("mff train: error: the following arguments are required: --input", file=sys.stderr)
        return 2
    series = _load(args)
    config = resolve_config(args)
    ck = train_mff(series, config)

    os.makedirs(args.out_dir, exist_ok=True)
    ck_path = os.path.join(args.out_dir, "checkpoint.json")
    loss_path = os.path.join(args.out_dir, "losses.csv")
    manifest_path = os.path.join(args.out_dir, "manifest.json")
    save_checkpoint(ck, ck_path)
    write_loss_history(ck, loss_path)
    manifest = {
        "tool": "mff",
        "version": _version(),
        "command": "train",
        "created": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
        "seed": ck.config.seed,
        "config": ck.config.to_dict(),
        "input": {
            "path": os.path.abspath(args.input),
            "sha256": _sha256(args.input),
            "value_column": args.value_column,
            "timestamp_column": args.timestamp_column,
            "n": series.n,
        },
        "outputs": {"checkpoint": ck_path, "losses": loss_path},
        "best_epoch": ck.best_epoch,
        "best_loss": ck.best_loss,
    }
    _write_json(manifest_path, manifest)
    print(f"best epoch {ck.best_epoch} loss {_num(ck.best_loss)}")
    print(f"wrote {ck_path}, {loss_path}, {manifest_path}")
    return 0


def cmd_predict(args) -> int:
    ck = load_checkpoint(args.checkpoint)
    series = _load(args)
    yhat = predict_next(ck, series)
    if args.format == "json":
        row, ordinal = final_features(ck, series)
        out = {
            "prediction": yhat,
            "features": dict(zip(ck.feature_names, row.tolist())),
            "ordinal": ordinal,
        }
        print(json.dumps(out))
    else:
        print(_num(yhat))
    return 0


def _write_predictions(path, timestamps, wf) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "y", "yhat"])
        for p, y, yh in zip(wf.positions.tolist(), wf.actual.tolist(), wf.predicted.tolist()):
            w.writerow([timestamps[p - 1], repr(y), repr(yh)])


def cmd_evaluate(args) -> int:
    ck = load_checkpoint(args.checkpoint)
    series = _load(args)
    wf = evaluate_walk_forward(ck, series)
    report = metrics.error_report(wf.predicted, wf.actual)
    h = ck.config.hidden
    name = f"MFF({h[0]},{h[1]})"
    print(metrics.format_table({name: report}))
    if args.output:
        _write_predictions(args.output, series.timestamps, wf)
    if args.table_csv:
        metrics.write_table_csv({name: report}, args.table_csv)
    return 0


BENCH_METHODS = ("mff", "naive", "sma", "ols")


def cmd_bench(args) -> int:
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    unknown = set(methods) - set(BENCH_METHODS)
    if unknown or not methods:
        print(f"mff bench: error: unknown methods {sorted(unknown)}; choose from {BENCH_METHODS}",
              file=sys.stderr)
        return 2
    series = _load(args)
    if args.checkpoint:
        ck = load_checkpoint(args.checkpoint)
    else:
        ck = train_mff(series, resolve_config(args))
    wf = evaluate_walk_forward(ck, series)
    v = series.values
    reports = {}
    for m in methods:
        if m == "mff":
            h = ck.config.hidden
            reports[f"MFF({h[0]},{h[1]})"] = metrics.error_report(wf.predicted, wf.actual)
        elif m == "naive":
            pred = metrics.walk_forward_baseline(v, wf.positions, metrics.naive_forecast)
            reports["Naive"] = metrics.error_report(pred, wf.actual)
        elif m == "sma":
            k = args.sma_k
            pred = metrics.walk_forward_baseline(v, wf.positions, lambda h: metrics.sma_forecast(h, k))
            reports[f"SMA(K={k})"] = metrics.error_report(pred, wf.actual)
        elif m == "ols":
            pred = metrics.walk_forward_baseline(v, wf.positions, metrics.ols_trend_forecast)
            reports["OLS trend"] = metrics.error_report(pred, wf.actual)
    print(metrics.format_table(reports))
    if args.output:
        metrics.write_table_csv(reports, args.output)
    return 0


def cmd_features(args) -> int:
    series = _load(args)
    ws = args.window if args.window is not None else max(1, round(series.n / 2))
    slices = sliding_window(series, ws)
    fs = default_function_sequence(args.apen_m, args.apen_r_factor)
    fm = build_feature_matrix(slices, fs)
    with open(args.output, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(fm.names)
        for row in fm.values.tolist():
            w.writerow([repr(x) for x in row])
    if args.scaler_out:
        # scaler is fitted on the training rows of the chronological split
        n_train = split_point(len(make_supervised(slices, series)), args.split)
        _, scaler = fit_standardize(fm, range(0, n_train))
        _write_json(args.scaler_out, {"names": list(fm.names), "train_rows": n_train, **scaler.to_dict()})
    print(f"wrote {fm.row_count}x{fm.m} feature matrix to {args.output}")
    return 0


# ------------------------------------------------------------------- parser


def _add_input(p, required=True):
    p.add_argument("--input", required=required, help="CSV file with a header row")
    p.add_argument("--value-column", default=None, help="value column (default: last column)")
    p.add_argument("--timestamp-column", default=None, help="label column (default: first column)")


def _add_training(p):
    S = argparse.SUPPRESS
    p.add_argument("--config", default=None, help="key = value file with TrainConfig fields")
    p.add_argument("--window", type=positive_int, default=S, help="sliding window size Ws")
    p.add_argument("--hidden", type=hidden_sizes, default=S, help="hidden sizes n1,n2 (default 8,5)")
    p.add_argument("--epochs", type=positive_int, default=S)
    p.add_argument("--base-lr", type=positive_float, default=S)
    p.add_argument("--max-lr", type=positive_float, default=S)
    p.add_argument("--step-up", type=positive_int, default=S, help="CLR step size up (epochs)")
    p.add_argument("--step-down", type=positive_int, default=S, help="CLR step size down (epochs)")
    p.add_argument("--split", type=fraction, default=S, help="train fraction (default 0.8)")
    p.add_argument("--seed", type=int, default=S)
    p.add_argument("--activation", choices=["tanh", "relu"], default=S)
    p.add_argument("--batch-mode", choices=["full", "sequential"], default=S)
    p.add_argument("--grad-clip", type=positive_float, default=S)
    p.add_argument("--apen-m", type=positive_int, default=S)
    p.add_argument("--apen-r-factor", type=float, default=S)
    p.add_argument("--beta1", type=float, default=S)
    p.add_argument("--beta2", type=float, default=S)
    p.add_argument("--eps", type=positive_float, default=S)
    p.add_argument("--no-standardize", dest="standardize_features", action="store_false", default=S,
                   help="feed raw features to the network")
    p.add_argument("--no-standardize-target", dest="standardize_target", action="store_false",
                   default=S, help="train on raw target values")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mff", description="Multi-feature fusion forecasting")
    parser.add_argument("--version", action="version", version=f"%(prog)s {_version()}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train a model and write checkpoint, losses and manifest")
    _add_input(p, required=False)
    _add_training(p)
    p.add_argument("--from-manifest", default=None, help="replay the config and input of a manifest")
    p.add_argument("--out-dir", default=".", help="directory for checkpoint.json, losses.csv, manifest.json")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="forecast the value after the end of the series")
    _add_input(p)
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("evaluate", help="score a checkpoint on its test share")
    _add_input(p)
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--output", default=None, help="per-point predictions CSV (t, y, yhat)")
    p.add_argument("--table-csv", default=None, help="metric row as CSV")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("bench", help="compare MFF with naive, SMA and OLS-trend baselines")
    _add_input(p)
    _add_training(p)
    p.add_argument("--checkpoint", default=None, help="use this checkpoint instead of training")
    p.add_argument("--methods", default=",".join(BENCH_METHODS))
    p.add_argument("--sma-k", type=positive_int, default=1)
    p.add_argument("--output", default=None, help="comparison table as CSV")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("features", help="dump the feature matrix")
    _add_input(p)
    p.add_argument("--window", type=positive_int, default=None)
    p.add_argument("--apen-m", type=positive_int, default=2)
    p.add_argument("--apen-r-factor", type=float, default=0.2)
    p.add_argument("--split", type=fraction, default=0.8)
    p.add_argument("--output", required=True, help="feature matrix CSV")
    p.add_argument("--scaler-out", default=None, help="JSON with scaler mean/std")
    p.set_defaults(func=cmd_features)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (MFFError, ValueError, OSError, KeyError, IndexError, FloatingPointError) as exc:
        code = exc.code if isinstance(exc, MFFError) else type(exc).__name__
        msg = str(exc) if not isinstance(exc, KeyError) or isinstance(exc, MFFError) else repr(exc)
        print(json.dumps({"error": code, "message": msg}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
