"""Adam and the triangular cyclical learning-rate schedule."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NonFiniteGradient, ShapeMismatch

__all__ = ["AdamState", "adam_init", "adam_step", "ClrSchedule", "clr_lr"]


@dataclass
class AdamState:
    m: dict = field(default_factory=dict)
    v: dict = field(default_factory=dict)
    t: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    def __post_init__(self):
        if not (0.0 <= self.beta1 < 1.0 and 0.0 <= self.beta2 < 1.0):
            raise ValueError(f"betas must lie in [0, 1), got ({self.beta1}, {self.beta2})")
        if not self.eps > 0:
            raise ValueError(f"eps must be > 0, got {self.eps}")

    def to_dict(self) -> dict:
        return {
            "t": self.t,
            "beta1": self.beta1,
            "beta2": self.beta2,
            "eps": self.eps,
            "m": {k: np.asarray(v).tolist() for k, v in self.m.items()},
            "v": {k: np.asarray(v).tolist() for k, v in self.v.items()},
        }


def adam_init(params: dict, beta1=0.9, beta2=0.999, eps=1e-8) -> AdamState:
    zeros = {k: np.zeros_like(np.asarray(p, dtype=np.float64)) for k, p in params.items()}
    return AdamState(
        m=zeros, v={k: z.copy() for k, z in zeros.items()}, t=0, beta1=beta1, beta2=beta2, eps=eps
    )


def adam_step(state: AdamState, params: dict, grads: dict, lr: float) -> tuple:
    """One Adam update; returns ``(new_params, new_state)`` and leaves inputs untouched.

    Moments that are missing from ``state`` start at zero.
    """
    if not lr > 0:
        raise ValueError(f"learning rate must be > 0, got {lr}")
    if set(grads) != set(params):
        raise ShapeMismatch(f"gradient keys {sorted(grads)} != parameter keys {sorted(params)}")

    t = state.t + 1
    b1, b2, eps = state.beta1, state.beta2, state.eps
    bc1 = 1.0 - b1**t
    bc2 = 1.0 - b2**t
    new_params, new_m, new_v = {}, {}, {}
    for k, theta in params.items():
        theta = np.asarray(theta, dtype=np.float64)
        g = np.asarray(grads[k], dtype=np.float64)
        if g.shape != theta.shape:
            raise ShapeMismatch(f"gradient {k} has shape {g.shape}, parameter has {theta.shape}")
        if not np.all(np.isfinite(g)):
            raise NonFiniteGradient(f"non-finite gradient for {k} at step {t}")
        m = state.m.get(k, np.zeros_like(theta))
        v = state.v.get(k, np.zeros_like(theta))
        m = b1 * m + (1.0 - b1) * g
        v = b2 * v + (1.0 - b2) * g**2
        m_hat = m / bc1
        v_hat = v / bc2
        new_params[k] = theta - lr * m_hat / (np.sqrt(v_hat) + eps)
        new_m[k] = m
        new_v[k] = v
    return new_params, AdamState(new_m, new_v, t, b1, b2, eps)


@dataclass(frozen=True)
class ClrSchedule:
    """Triangular cycle between ``base_lr`` and ``max_lr``.

    The rate climbs linearly for ``step_size_up`` iterations, then falls
    linearly for ``step_size_down`` iterations, and repeats.
    """

    base_lr: float
    max_lr: float
    step_size_up: int
    step_size_down: int

    def __post_init__(self):
        if not (0 < self.base_lr <= self.max_lr):
            raise ValueError(
                f"need 0 < base_lr <= max_lr, got base={self.base_lr}, max={self.max_lr}"
            )
        if self.step_size_up < 1 or self.step_size_down < 1:
            raise ValueError("step sizes must be positive integers")

    @property
    def period(self) -> int:
        return self.step_size_up + self.step_size_down

    def __call__(self, iteration: int) -> float:
        return clr_lr(self, iteration)


def clr_lr(schedule: ClrSchedule, iteration: int) -> float:
    if iteration < 0:
        raise ValueError(f"iteration must be >= 0, got {iteration}")
    base, top = schedule.base_lr, schedule.max_lr
    up, down = schedule.step_size_up, schedule.step_size_down
    p = iteration % (up + down)
    if p < up:
        lr = base + (top - base) * (p / up)
    else:
        lr = top - (top - base) * ((p - up) / down)
    return min(max(lr, base), top)
