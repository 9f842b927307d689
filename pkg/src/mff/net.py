"""Two-hidden-layer perceptron for scalar regression.

Layout is ``m_in -> n1 -> n2 -> 1`` with a shared hidden activation and a
linear output. Parameters live in a plain dict keyed ``W1, b1, W2, b2, W3,
b3`` so the optimizer can treat them uniformly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyInput, LengthMismatch, ShapeMismatch

__all__ = [
    "PARAM_NAMES",
    "ACTIVATIONS",
    "MlpModel",
    "Cache",
    "mlp_new",
    "forward",
    "forward_batch",
    "backward",
    "backward_batch",
    "mse_loss",
]

PARAM_NAMES = ("W1", "b1", "W2", "b2", "W3", "b3")


def _tanh(z):
    return np.tanh(z)


def _tanh_grad(z, a):
    return 1.0 - a * a


def _relu(z):
    return np.maximum(z, 0.0)


def _relu_grad(z, a):
    return (z > 0).astype(np.float64)


# name -> (activation, derivative given pre-activation z and output a)
ACTIVATIONS = {
    "tanh": (_tanh, _tanh_grad),
    "relu": (_relu, _relu_grad),
}


@dataclass
class MlpModel:
    params: dict
    activation: str = "tanh"

    def __post_init__(self):
        if self.activation not in ACTIVATIONS:
            raise ValueError(
                f"unknown activation {self.activation!r}; choose from {sorted(ACTIVATIONS)}"
            )
        p = {k: np.asarray(self.params[k], dtype=np.float64) for k in PARAM_NAMES}
        n1, m_in = p["W1"].shape
        n2 = p["W2"].shape[0]
        expected = {
            "W1": (n1, m_in),
            "b1": (n1,),
            "W2": (n2, n1),
            "b2": (n2,),
            "W3": (1, n2),
            "b3": (1,),
        }
        for k, shape in expected.items():
            if p[k].shape != shape:
                raise ShapeMismatch(f"{k} has shape {p[k].shape}, expected {shape}")
        self.params = p

    @property
    def sizes(self) -> tuple:
        n1, m_in = self.params["W1"].shape
        return (m_in, n1, self.params["W2"].shape[0], 1)

    @property
    def n_params(self) -> int:
        return sum(v.size for v in self.params.values())

    def copy(self) -> "MlpModel":
        return MlpModel({k: v.copy() for k, v in self.params.items()}, self.activation)

    def is_finite(self) -> bool:
        return all(np.all(np.isfinite(v)) for v in self.params.values())


@dataclass
class Cache:
    """Layer outputs kept from the forward pass for backpropagation."""

    x: np.ndarray
    z1: np.ndarray
    a1: np.ndarray
    z2: np.ndarray
    a2: np.ndarray
    out: np.ndarray = field(repr=False)


def mlp_new(m_in: int, n1: int, n2: int, seed: int = 0, activation: str = "tanh") -> MlpModel:
    """Fresh model; weights ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)), zero biases."""
    for name, size in (("m_in", m_in), ("n1", n1), ("n2", n2)):
        if int(size) < 1:
            raise ValueError(f"{name} must be >= 1, got {size}")
    rng = np.random.default_rng(seed)

    def init(fan_out, fan_in):
        bound = 1.0 / np.sqrt(fan_in)
        return rng.uniform(-bound, bound, size=(fan_out, fan_in))

    params = {
        "W1": init(n1, m_in),
        "b1": np.zeros(n1),
        "W2": init(n2, n1),
        "b2": np.zeros(n2),
        "W3": init(1, n2),
        "b3": np.zeros(1),
    }
    return MlpModel(params, activation)


def forward_batch(model: MlpModel, X) -> tuple:
    """Predictions for every row of ``X`` plus the activation cache."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != model.sizes[0]:
        raise ShapeMismatch(f"expected input of shape (k, {model.sizes[0]}), got {X.shape}")
    act, _ = ACTIVATIONS[model.activation]
    p = model.params
    z1 = X @ p["W1"].T + p["b1"]
    a1 = act(z1)
    z2 = a1 @ p["W2"].T + p["b2"]
    a2 = act(z2)
    out = a2 @ p["W3"].T + p["b3"]
    return out[:, 0], Cache(X, z1, a1, z2, a2, out)


def forward(model: MlpModel, x) -> tuple:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise ShapeMismatch(f"expected a 1-d feature vector, got shape {x.shape}")
    preds, cache = forward_batch(model, x[None, :])
    return float(preds[0]), cache


def backward_batch(model: MlpModel, X, cache: Cache, targets) -> dict:
    """Gradient of the mean squared error over the batch."""
    targets = np.asarray(targets, dtype=np.float64).reshape(-1)
    k = cache.x.shape[0]
    if targets.size != k:
        raise ShapeMismatch(f"{targets.size} targets for a batch of {k}")
    if np.asarray(X).shape != cache.x.shape:
        raise ShapeMismatch("cache does not belong to this input")
    _, dact = ACTIVATIONS[model.activation]
    p = model.params

    d_out = (2.0 / k) * (cache.out[:, 0] - targets)[:, None]  # (k, 1)
    g = {"W3": d_out.T @ cache.a2, "b3": d_out.sum(axis=0)}
    d_z2 = (d_out @ p["W3"]) * dact(cache.z2, cache.a2)
    g["W2"] = d_z2.T @ cache.a1
    g["b2"] = d_z2.sum(axis=0)
    d_z1 = (d_z2 @ p["W2"]) * dact(cache.z1, cache.a1)
    g["W1"] = d_z1.T @ cache.x
    g["b1"] = d_z1.sum(axis=0)
    return {name: g[name] for name in PARAM_NAMES}


def backward(model: MlpModel, x, cache: Cache, target: float) -> dict:
    """Gradient of ``(prediction - target)**2`` for a single example."""
    x = np.asarray(x, dtype=np.float64)
    return backward_batch(model, x.reshape(1, -1), cache, [target])


def mse_loss(predictions, targets) -> float:
    predictions = np.asarray(predictions, dtype=np.float64).reshape(-1)
    targets = np.asarray(targets, dtype=np.float64).reshape(-1)
    if predictions.size != targets.size:
        raise LengthMismatch(f"{predictions.size} predictions vs {targets.size} targets")
    if predictions.size == 0:
        raise EmptyInput("mse of an empty batch")
    return float(np.mean((predictions - targets) ** 2))
