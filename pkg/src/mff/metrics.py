"""Forecast error measures and simple baseline forecasters.

MAPE and SMAPE are fractions, not percentages. A measure whose denominator
vanishes for the given data is reported as ``None`` (undefined) rather than
aborting the whole report.
"""

from __future__ import annotations

import csv
from dataclasses import asdict, dataclass
from typing import Callable, Mapping, Optional

import numpy as np

from .errors import EmptyInput, LengthMismatch, TooFewValues

__all__ = [
    "METRIC_NAMES",
    "ErrorReport",
    "error_report",
    "naive_forecast",
    "sma_forecast",
    "ols_trend_forecast",
    "walk_forward_baseline",
    "format_table",
    "write_table_csv",
]

METRIC_NAMES = ("mad", "mape", "smape", "rmse", "nrmse")


@dataclass(frozen=True)
class ErrorReport:
    mad: Optional[float]
    mape: Optional[float]
    smape: Optional[float]
    rmse: Optional[float]
    nrmse: Optional[float]
    count: int

    def as_dict(self) -> dict:
        return asdict(self)

    def row(self) -> list:
        return [getattr(self, k) for k in METRIC_NAMES]


def error_report(predicted, actual) -> ErrorReport:
    yhat = np.asarray(predicted, dtype=np.float64).reshape(-1)
    y = np.asarray(actual, dtype=np.float64).reshape(-1)
    if yhat.size != y.size:
        raise LengthMismatch(f"{yhat.size} predictions vs {y.size} actual values")
    if y.size == 0:
        raise EmptyInput("cannot score an empty forecast")

    err = np.abs(yhat - y)
    mad = float(np.mean(err))
    rmse = float(np.sqrt(np.mean(err**2)))
    mape = float(np.mean(err / y)) if np.all(y != 0) else None
    denom = yhat + y
    smape = float(2.0 / y.size * np.sum(err / denom)) if np.all(denom != 0) else None
    spread = float(np.max(y) - np.min(y))
    nrmse = rmse / spread if spread != 0 else None
    return ErrorReport(mad, mape, smape, rmse, nrmse, int(y.size))


def _history(values) -> np.ndarray:
    v = np.asarray(values, dtype=np.float64).reshape(-1)
    if v.size == 0:
        raise EmptyInput("no observed values to forecast from")
    return v


def naive_forecast(values) -> float:
    """Random-walk forecast: the last observed value."""
    return float(_history(values)[-1])


def sma_forecast(values, k: int = 1) -> float:
    """Mean of the last ``k`` values."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    v = _history(values)
    if v.size < k:
        raise TooFewValues(f"SMA({k}) needs {k} values, got {v.size}")
    return float(np.mean(v[-k:]))


def ols_trend_forecast(values) -> float:
    """Least-squares line through ``(index, value)``, extrapolated one step.

    Indices are 1..t; the forecast is the line evaluated at t + 1.
    """
    v = _history(values)
    if v.size < 2:
        raise TooFewValues(f"a trend line needs at least 2 values, got {v.size}")
    t = np.arange(1, v.size + 1, dtype=np.float64)
    tc = t - t.mean()
    slope = float(np.dot(tc, v - v.mean()) / np.dot(tc, tc))
    intercept = float(v.mean() - slope * t.mean())
    return intercept + slope * (v.size + 1)


def walk_forward_baseline(
    values, positions, forecaster: Callable[[np.ndarray], float]
) -> np.ndarray:
    """Forecast ``values[p - 1]`` from ``values[:p - 1]`` for each 1-based position ``p``."""
    v = np.asarray(values, dtype=np.float64)
    out = []
    for p in positions:
        p = int(p)
        if not 2 <= p <= v.size:
            raise IndexError(f"position {p} has no history inside a series of {v.size}")
        out.append(forecaster(v[: p - 1]))
    return np.asarray(out)


def _fmt(x) -> str:
    if x is None:
        return "undefined"
    return repr(float(x))


def format_table(reports: Mapping[str, ErrorReport]) -> str:
    """Aligned plain-text table, one row per method."""
    header = ["method", "MAD", "MAPE", "SMAPE", "RMSE", "NRMSE"]
    rows = [[name] + [_fmt(x) for x in rep.row()] for name, rep in reports.items()]
    widths = [max(len(r[i]) for r in [header] + rows) for i in range(len(header))]
    lines = []
    for r in [header] + rows:
        cells = [r[0].ljust(widths[0])] + [c.rjust(w) for c, w in zip(r[1:], widths[1:])]
        lines.append("  ".join(cells))
    return "\n".join(lines)


def write_table_csv(reports: Mapping[str, ErrorReport], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["method", "MAD", "MAPE", "SMAPE", "RMSE", "NRMSE"])
        for name, rep in reports.items():
            w.writerow([name] + [_fmt(x) for x in rep.row()])
