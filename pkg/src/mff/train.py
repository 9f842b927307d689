"""End-to-end MFF training: slice, featurise, fit the perceptron, keep the best epoch."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, fields, replace
from typing import NamedTuple, Optional

import numpy as np

from .errors import (
    NonFiniteLoss,
    RangeOutOfBounds,
    ScalerMissing,
    SeriesTooShort,
)
from .features import ColumnScaler, FeatureMatrix, build_feature_matrix, default_function_sequence
from .net import ACTIVATIONS, PARAM_NAMES, MlpModel, backward_batch, forward_batch, mlp_new, mse_loss
from .optim import ClrSchedule, adam_init, adam_step, clr_lr
from .series import TimeSeries, make_supervised, sliding_window, split_point

__all__ = [
    "TrainConfig",
    "TrainedCheckpoint",
    "Prepared",
    "WalkForward",
    "prepare",
    "train_mff",
    "predict_next",
    "evaluate_walk_forward",
    "save_checkpoint",
    "load_checkpoint",
    "write_loss_history",
]

CHECKPOINT_FORMAT = "mff-checkpoint/1"


@dataclass(frozen=True)
class TrainConfig:
    """Everything that determines a training run.

    ``window_size=None`` means ``round(n / 2)``; ``step_size_up`` /
    ``step_size_down`` of None mean ``epochs // 4`` (at least 1).
    """

    window_size: Optional[int] = None
    apen_m: int = 2
    apen_r_factor: float = 0.2
    standardize_features: bool = True
    standardize_target: bool = True
    hidden: tuple = (8, 5)
    activation: str = "tanh"
    epochs: int = 10000
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    base_lr: float = 1e-12
    max_lr: float = 1e-4
    step_size_up: Optional[int] = None
    step_size_down: Optional[int] = None
    train_fraction: float = 0.8
    seed: int = 0
    batch_mode: str = "full"
    grad_clip: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "hidden", tuple(int(h) for h in self.hidden))
        if len(self.hidden) != 2 or min(self.hidden) < 1:
            raise ValueError(f"hidden must be two positive sizes, got {self.hidden}")
        if self.window_size is not None and self.window_size < 1:
            raise ValueError(f"window_size must be >= 1, got {self.window_size}")
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        if self.apen_m < 1 or self.apen_r_factor < 0:
            raise ValueError("apen_m must be >= 1 and apen_r_factor >= 0")
        if self.activation not in ACTIVATIONS:
            raise ValueError(f"unknown activation {self.activation!r}")
        if self.batch_mode not in ("full", "sequential"):
            raise ValueError(f"batch_mode must be 'full' or 'sequential', got {self.batch_mode!r}")
        if self.grad_clip is not None and not self.grad_clip > 0:
            raise ValueError("grad_clip must be positive when given")
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError(f"train_fraction must lie in (0, 1), got {self.train_fraction}")
        # validates lr bounds, betas and eps eagerly
        self.schedule()
        adam_init({}, self.beta1, self.beta2, self.eps)

    def resolve(self, n: int) -> "TrainConfig":
        """Fill every defaulted field for a series of length ``n``."""
        quarter = max(1, self.epochs // 4)
        return replace(
            self,
            window_size=self.window_size if self.window_size is not None else max(1, round(n / 2)),
            step_size_up=self.step_size_up or quarter,
            step_size_down=self.step_size_down or quarter,
        )

    def schedule(self) -> ClrSchedule:
        quarter = max(1, self.epochs // 4)
        return ClrSchedule(
            self.base_lr,
            self.max_lr,
            self.step_size_up or quarter,
            self.step_size_down or quarter,
        )

    def to_dict(self) -> dict:
        d = asdict(self)
        d["hidden"] = list(self.hidden)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "TrainConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)


@dataclass
class TrainedCheckpoint:
    model: MlpModel
    best_epoch: int
    best_loss: float
    feature_scaler: Optional[ColumnScaler]
    target_scaler: Optional[ColumnScaler]
    config: TrainConfig
    loss_history: np.ndarray
    feature_names: tuple = ()
    n_train: int = 0
    n_examples: int = 0

    @property
    def window_size(self) -> int:
        return self.config.window_size

    def lr_history(self) -> np.ndarray:
        sched = self.config.schedule()
        return np.array([clr_lr(sched, e) for e in range(len(self.loss_history))])


class Prepared(NamedTuple):
    """Slices, raw features and targets for one series."""

    config: TrainConfig
    features: FeatureMatrix
    targets: np.ndarray
    n_train: int


class WalkForward(NamedTuple):
    positions: np.ndarray  # 1-based position of each target in the series
    predicted: np.ndarray
    actual: np.ndarray


def _series(series) -> TimeSeries:
    return series if isinstance(series, TimeSeries) else TimeSeries(values=series)


def _function_sequence(config: TrainConfig):
    return default_function_sequence(apen_m=config.apen_m, apen_r_factor=config.apen_r_factor)


def prepare(series, config: TrainConfig) -> Prepared:
    """Slice and featurise ``series``; the feature matrix includes the final, target-less slice."""
    series = _series(series)
    config = config.resolve(series.n)
    ws = config.window_size
    if series.n < ws + 2:
        raise SeriesTooShort(
            f"series of length {series.n} is too short for window {ws}; need at least {ws + 2}"
        )
    slices = sliding_window(series, ws)
    sup = make_supervised(slices, series)
    feats = build_feature_matrix(slices, _function_sequence(config))
    n_train = split_point(len(sup), config.train_fraction)
    return Prepared(config, feats, sup.targets, n_train)


def _clip(grads: dict, limit: Optional[float]) -> dict:
    if limit is None:
        return grads
    norm = math.sqrt(sum(float(np.sum(g * g)) for g in grads.values()))
    if norm <= limit:
        return grads
    return {k: g * (limit / norm) for k, g in grads.items()}


def train_mff(series, config: TrainConfig = TrainConfig()) -> TrainedCheckpoint:
    """Train on the chronological training share and return the minimum-loss epoch.

    Each epoch evaluates the training loss with the current parameters,
    records it, then applies the update(s) for that epoch with the learning
    rate ``clr_lr(epoch - 1)``. The returned parameters are exactly those
    that produced the smallest recorded loss (earliest epoch on ties).
    """
    prep = prepare(series, config)
    config = prep.config
    X = prep.features.values[: prep.n_train]
    y = prep.targets[: prep.n_train]

    fscaler = ColumnScaler.fit(X) if config.standardize_features else None
    tscaler = ColumnScaler.fit(y) if config.standardize_target else None
    if fscaler is not None:
        X = fscaler.transform(X)
    if tscaler is not None:
        y = tscaler.transform(y[:, None])[:, 0]

    model = mlp_new(X.shape[1], *config.hidden, seed=config.seed, activation=config.activation)
    params = model.params
    state = adam_init(params, config.beta1, config.beta2, config.eps)
    sched = config.schedule()

    history = np.empty(config.epochs)
    best_loss, best_epoch, best_params = math.inf, 0, None
    for epoch in range(1, config.epochs + 1):
        lr = clr_lr(sched, epoch - 1)
        current = MlpModel(params, config.activation)
        with np.errstate(over="ignore", invalid="ignore"):
            preds, cache = forward_batch(current, X)
            loss = mse_loss(preds, y)
        if not math.isfinite(loss):
            raise NonFiniteLoss(epoch, loss)
        history[epoch - 1] = loss
        if loss < best_loss:
            best_loss, best_epoch, best_params = loss, epoch, params

        if config.batch_mode == "full":
            grads = _clip(backward_batch(current, X, cache, y), config.grad_clip)
            params, state = adam_step(state, params, grads, lr)
        else:
            for i in range(X.shape[0]):
                current = MlpModel(params, config.activation)
                xi = X[i : i + 1]
                _, c = forward_batch(current, xi)
                grads = _clip(backward_batch(current, xi, c, y[i : i + 1]), config.grad_clip)
                params, state = adam_step(state, params, grads, lr)

    best = MlpModel({k: np.array(best_params[k]) for k in PARAM_NAMES}, config.activation)
    return TrainedCheckpoint(
        model=best,
        best_epoch=best_epoch,
        best_loss=best_loss,
        feature_scaler=fscaler,
        target_scaler=tscaler,
        config=config,
        loss_history=history,
        feature_names=prep.features.names,
        n_train=prep.n_train,
        n_examples=int(prep.targets.size),
    )


def _predict_rows(ck: TrainedCheckpoint, raw: np.ndarray) -> np.ndarray:
    cfg = ck.config
    if cfg.standardize_features:
        if ck.feature_scaler is None:
            raise ScalerMissing("checkpoint expects standardised features but has no feature scaler")
        raw = ck.feature_scaler.transform(raw)
    if cfg.standardize_target and ck.target_scaler is None:
        raise ScalerMissing("checkpoint expects a standardised target but has no target scaler")
    preds, _ = forward_batch(ck.model, raw)
    if cfg.standardize_target:
        preds = ck.target_scaler.inverse_transform(preds[:, None])[:, 0]
    return preds


def final_features(ck: TrainedCheckpoint, series) -> tuple:
    """Raw feature vector of the last slice of ``series`` and that slice's ordinal."""
    series = _series(series)
    ws = ck.window_size
    if series.n < ws:
        raise SeriesTooShort(f"series of length {series.n} is shorter than the window {ws}")
    ordinal = series.n - ws + 1
    last = series.values[ordinal - 1 :]
    return _function_sequence(ck.config)(last, ordinal), ordinal


def predict_next(ck: TrainedCheckpoint, series) -> float:
    """Forecast the value following the end of ``series``."""
    row, _ = final_features(ck, series)
    return float(_predict_rows(ck, row[None, :])[0])


def evaluate_walk_forward(ck: TrainedCheckpoint, series, test_range=None) -> WalkForward:
    """One-step forecasts for a range of supervised examples, without refitting.

    ``test_range`` indexes supervised examples (0-based, half-open); by
    default it is everything after the checkpoint's training share. It may
    not reach into the training share.
    """
    series = _series(series)
    ws = ck.window_size
    if series.n < ws:
        raise SeriesTooShort(f"series of length {series.n} is shorter than the window {ws}")
    count = series.n - ws
    if test_range is None:
        test_range = range(ck.n_train, count)
    if isinstance(test_range, tuple):
        test_range = range(*test_range)
    if len(test_range) == 0:
        raise RangeOutOfBounds("test range is empty")
    if test_range.step != 1:
        raise RangeOutOfBounds("test range must be contiguous")
    if test_range.start < ck.n_train:
        raise RangeOutOfBounds(
            f"test range starts at {test_range.start} inside the training share [0, {ck.n_train})"
        )
    if test_range.stop > count:
        raise RangeOutOfBounds(f"test range ends at {test_range.stop}; only {count} examples exist")

    fs = _function_sequence(ck.config)
    v = series.values
    rows = np.vstack([fs(v[i : i + ws], i + 1) for i in test_range])
    positions = np.array([i + ws + 1 for i in test_range])
    actual = v[positions - 1]
    return WalkForward(positions, _predict_rows(ck, rows), actual.copy())


def checkpoint_to_dict(ck: TrainedCheckpoint) -> dict:
    m_in, n1, n2, _ = ck.model.sizes
    return {
        "format": CHECKPOINT_FORMAT,
        "layer_sizes": [m_in, n1, n2, 1],
        "activation": ck.model.activation,
        "params": {k: ck.model.params[k].ravel(order="C").tolist() for k in PARAM_NAMES},
        "best_epoch": ck.best_epoch,
        "best_loss": ck.best_loss,
        "feature_names": list(ck.feature_names),
        "feature_scaler": ck.feature_scaler.to_dict() if ck.feature_scaler else None,
        "target_scaler": ck.target_scaler.to_dict() if ck.target_scaler else None,
        "n_train": ck.n_train,
        "n_examples": ck.n_examples,
        "config": ck.config.to_dict(),
        "loss_history": ck.loss_history.tolist(),
    }


def checkpoint_from_dict(d: dict) -> TrainedCheckpoint:
    if d.get("format") != CHECKPOINT_FORMAT:
        raise ValueError(f"unsupported checkpoint format {d.get('format')!r}")
    m_in, n1, n2, _ = d["layer_sizes"]
    shapes = {"W1": (n1, m_in), "b1": (n1,), "W2": (n2, n1), "b2": (n2,), "W3": (1, n2), "b3": (1,)}
    params = {k: np.asarray(d["params"][k], dtype=np.float64).reshape(shapes[k]) for k in PARAM_NAMES}
    return TrainedCheckpoint(
        model=MlpModel(params, d["activation"]),
        best_epoch=int(d["best_epoch"]),
        best_loss=float(d["best_loss"]),
        feature_scaler=ColumnScaler.from_dict(d["feature_scaler"]) if d["feature_scaler"] else None,
        target_scaler=ColumnScaler.from_dict(d["target_scaler"]) if d["target_scaler"] else None,
        config=TrainConfig.from_dict(d["config"]),
        loss_history=np.asarray(d["loss_history"], dtype=np.float64),
        feature_names=tuple(d.get("feature_names", ())),
        n_train=int(d["n_train"]),
        n_examples=int(d["n_examples"]),
    )


def save_checkpoint(ck: TrainedCheckpoint, path) -> None:
    # json writes floats with repr(), which round-trips exactly
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(checkpoint_to_dict(ck), fh, indent=1)
        fh.write("\n")


def load_checkpoint(path) -> TrainedCheckpoint:
    with open(path, encoding="utf-8") as fh:
        return checkpoint_from_dict(json.load(fh))


def write_loss_history(ck: TrainedCheckpoint, path) -> None:
    lrs = ck.lr_history()
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["epoch", "lr", "loss"])
        for e, (lr, loss) in enumerate(zip(lrs.tolist(), ck.loss_history.tolist()), start=1):
            w.writerow([e, repr(lr), repr(loss)])
