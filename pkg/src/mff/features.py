"""Slice-level feature functions, function sequences and column scaling.

A feature function maps one time slice (plus its 1-based ordinal in the
slice set) to a single real number. A :class:`FunctionSequence` applies an
ordered list of them to every slice, giving one row per slice.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Optional

import numpy as np

from .errors import EmptyTrainRange, FeatureError, ShapeMismatch, SliceTooShort
from .series import TimeSlice, TimeSliceSet

__all__ = [
    "FeatureFunction",
    "FunctionSequence",
    "FeatureMatrix",
    "ColumnScaler",
    "feat_index",
    "feat_mean",
    "feat_std",
    "feat_distance",
    "feat_apen",
    "feat_vg_degree",
    "visibility_edges",
    "default_function_sequence",
    "build_feature_matrix",
    "fit_standardize",
]


def _values(x) -> np.ndarray:
    if isinstance(x, TimeSlice):
        return x.values
    return np.asarray(x, dtype=np.float64)


def feat_index(slice_, ordinal: int) -> float:
    """Position of the slice within its slice set (1-based)."""
    if ordinal < 1:
        raise ValueError(f"ordinal must be >= 1, got {ordinal}")
    return float(ordinal)


def feat_mean(slice_) -> float:
    return float(np.mean(_values(slice_)))


def feat_std(slice_) -> float:
    """Population standard deviation (divides by the slice length)."""
    return float(np.std(_values(slice_), ddof=0))


def feat_distance(slice_) -> float:
    x = _values(slice_)
    return float(np.max(x) - np.min(x))


def feat_apen(slice_, m_embed: int = 2, r: Optional[float] = None, r_factor: float = 0.2) -> float:
    """Approximate entropy ``Phi^m(r) - Phi^{m+1}(r)``.

    Embedding vectors are compared with the Chebyshev distance and
    self-matches are counted, so every ``C_i`` is positive. When ``r`` is
    None it is ``r_factor`` times the population std of the slice; a
    constant slice then has entropy 0.
    """
    x = _values(slice_)
    n = x.size
    if m_embed < 1:
        raise ValueError(f"m_embed must be >= 1, got {m_embed}")
    if n < m_embed + 1:
        raise SliceTooShort(f"ApEn(m={m_embed}) needs at least {m_embed + 1} points, got {n}")
    if r is None:
        sd = float(np.std(x))
        if sd == 0.0:
            return 0.0
        r = r_factor * sd
    if r < 0:
        raise ValueError(f"tolerance r must be >= 0, got {r}")

    def phi(m: int) -> float:
        emb = np.lib.stride_tricks.sliding_window_view(x, m)
        dist = np.max(np.abs(emb[:, None, :] - emb[None, :, :]), axis=2)
        c = np.count_nonzero(dist <= r, axis=1) / emb.shape[0]
        return float(np.mean(np.log(c)))

    return phi(m_embed) - phi(m_embed + 1)


def visibility_edges(slice_) -> list:
    """Edges ``(a, b)``, ``a < b``, of the natural visibility graph (0-based).

    Points sit at integer abscissae. ``b`` sees ``a`` iff every point between
    them lies strictly below the chord, which is the same as the slope from
    ``a`` to ``b`` exceeding every slope from ``a`` to an intermediate point.
    """
    x = _values(slice_)
    n = x.size
    edges = []
    for a in range(n - 1):
        slopes = (x[a + 1 :] - x[a]) / np.arange(1, n - a, dtype=np.float64)
        best = np.maximum.accumulate(slopes)
        seen = np.empty(slopes.size, dtype=bool)
        seen[0] = True
        seen[1:] = slopes[1:] > best[:-1]
        edges.extend((a, a + 1 + int(k)) for k in np.flatnonzero(seen))
    return edges


def feat_vg_degree(slice_) -> float:
    """Sum of node degrees of the natural visibility graph, i.e. ``2|E|``."""
    return float(2 * len(visibility_edges(slice_)))


@dataclass(frozen=True)
class FeatureFunction:
    """A named feature. ``func`` receives the slice values and the ordinal."""

    name: str
    func: Callable[[np.ndarray, int], float]

    def evaluate(self, slice_: TimeSlice | np.ndarray, ordinal: int) -> float:
        return float(self.func(_values(slice_), ordinal))

    __call__ = evaluate

    @classmethod
    def from_values(cls, name: str, fn: Callable[[np.ndarray], float]) -> "FeatureFunction":
        """Wrap a function that ignores the slice ordinal."""
        return cls(name, lambda v, _ordinal: fn(v))


class FunctionSequence:
    def __init__(self, functions: Iterable[FeatureFunction]):
        functions = tuple(functions)
        if not functions:
            raise ValueError("a function sequence needs at least one function")
        names = [f.name for f in functions]
        if len(set(names)) != len(names):
            raise ValueError(f"feature names must be unique: {names}")
        self.functions = functions

    @property
    def names(self) -> list:
        return [f.name for f in self.functions]

    def __len__(self) -> int:
        return len(self.functions)

    def __iter__(self):
        return iter(self.functions)

    def __call__(self, slice_, ordinal: int) -> np.ndarray:
        row = np.empty(len(self.functions))
        for j, f in enumerate(self.functions):
            try:
                row[j] = f.evaluate(slice_, ordinal)
            except Exception as exc:
                raise FeatureError(f.name, ordinal, exc) from exc
        return row

    def __repr__(self) -> str:
        return f"FunctionSequence({self.names})"


def default_function_sequence(apen_m: int = 2, apen_r_factor: float = 0.2) -> FunctionSequence:
    """Index, mean, std, distance, approximate entropy and visibility degree."""
    return FunctionSequence(
        [
            FeatureFunction("index", lambda v, i: feat_index(v, i)),
            FeatureFunction.from_values("mean", feat_mean),
            FeatureFunction.from_values("std", feat_std),
            FeatureFunction.from_values("distance", feat_distance),
            FeatureFunction.from_values(
                "apen", lambda v: feat_apen(v, m_embed=apen_m, r_factor=apen_r_factor)
            ),
            FeatureFunction.from_values("vg_degree", feat_vg_degree),
        ]
    )


@dataclass(frozen=True)
class FeatureMatrix:
    values: np.ndarray
    names: tuple

    @property
    def shape(self):
        return self.values.shape

    @property
    def m(self) -> int:
        return self.values.shape[1]

    @property
    def row_count(self) -> int:
        return self.values.shape[0]


def build_feature_matrix(slice_set: TimeSliceSet, fs: FunctionSequence) -> FeatureMatrix:
    if len(slice_set) == 0:
        raise ValueError("slice set is empty")
    rows = np.vstack([fs(s, s.ordinal) for s in slice_set])
    return FeatureMatrix(values=rows, names=tuple(fs.names))


@dataclass(frozen=True)
class ColumnScaler:
    """Per-column standardisation ``(x - mean) / std``.

    Columns whose std is numerically zero are only centred.
    """

    mean: np.ndarray
    std: np.ndarray

    @classmethod
    def fit(cls, x) -> "ColumnScaler":
        x = np.asarray(x, dtype=np.float64)
        if x.ndim == 1:
            x = x[:, None]
        if x.shape[0] == 0:
            raise EmptyTrainRange("cannot fit a scaler on zero rows")
        mean = x.mean(axis=0)
        std = x.std(axis=0)
        # constant columns come out with std of a few ulps, not exactly 0
        tiny = 1e-12 * np.maximum(1.0, np.abs(mean))
        std = np.where(std <= tiny, 0.0, std)
        return cls(mean=mean, std=std)

    @property
    def divisor(self) -> np.ndarray:
        return np.where(self.std == 0.0, 1.0, self.std)

    def _check(self, x: np.ndarray):
        if x.shape[-1] != self.mean.size:
            raise ShapeMismatch(f"expected {self.mean.size} columns, got {x.shape[-1]}")

    def transform(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        self._check(x)
        return (x - self.mean) / self.divisor

    def inverse_transform(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=np.float64)
        self._check(z)
        return z * self.divisor + self.mean

    def to_dict(self) -> dict:
        return {"mean": self.mean.tolist(), "std": self.std.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "ColumnScaler":
        return cls(
            mean=np.asarray(d["mean"], dtype=np.float64),
            std=np.asarray(d["std"], dtype=np.float64),
        )


def fit_standardize(matrix: FeatureMatrix, train_rows) -> tuple:
    """Fit a :class:`ColumnScaler` on ``train_rows`` and transform every row.

    ``train_rows`` is anything that indexes rows: a ``range``, a ``slice`` or
    an index array.
    """
    if isinstance(train_rows, range):
        train_rows = slice(train_rows.start, train_rows.stop, train_rows.step)
    fit_on = matrix.values[train_rows]
    if fit_on.shape[0] == 0:
        raise EmptyTrainRange("training row range is empty")
    scaler = ColumnScaler.fit(fit_on)
    scaled = FeatureMatrix(values=scaler.transform(matrix.values), names=matrix.names)
    return scaled, scaler
