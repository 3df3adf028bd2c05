"""Labelled data container and the plug-in parameter estimators."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Literal

import numpy as np

from .errors import DimensionMismatch, EmptyClass, EmptyDataset, InsufficientSamples

CovMode = Literal["mle", "unbiased"]


@dataclass(frozen=True)
class LabeledDataset:
    """``n`` rows of dimension ``d`` with integer labels in ``0..n_classes-1``."""

    X: np.ndarray
    y: np.ndarray
    n_classes: int

    def __post_init__(self):
        X = np.asarray(self.X, dtype=float)
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        y = np.asarray(self.y)
        if X.ndim != 2:
            raise DimensionMismatch(f"X must be 2-D, got shape {X.shape}")
        if y.shape != (X.shape[0],):
            raise DimensionMismatch(f"{X.shape[0]} rows but {y.shape} labels")
        if y.size and not np.issubdtype(y.dtype, np.integer):
            if not np.all(y == np.round(y)):
                raise ValueError("labels must be integers")
        y = y.astype(np.int64)
        if y.size and (y.min() < 0 or y.max() >= self.n_classes):
            raise ValueError(f"labels must lie in 0..{self.n_classes - 1}")
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)

    @classmethod
    def from_arrays(cls, X, y, n_classes: int | None = None) -> "LabeledDataset":
        y = np.asarray(y)
        if n_classes is None:
            n_classes = int(y.max()) + 1 if y.size else 0
        return cls(X, y, n_classes)

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def dim(self) -> int:
        return self.X.shape[1]

    @property
    def class_counts(self) -> np.ndarray:
        return np.bincount(self.y, minlength=self.n_classes)

    def rows(self, k: int) -> np.ndarray:
        return self.X[self.y == k]


def estimate_priors(ds: LabeledDataset) -> np.ndarray:
    """Class frequencies ``n_k / n``."""
    if ds.n == 0:
        raise EmptyDataset("cannot estimate priors from an empty dataset")
    return ds.class_counts / ds.n


def _class_rows(ds: LabeledDataset, k: int, minimum: int = 1) -> np.ndarray:
    rows = ds.rows(k)
    if rows.shape[0] == 0:
        raise EmptyClass(f"class {k} has no rows")
    if rows.shape[0] < minimum:
        raise InsufficientSamples(f"class {k} has {rows.shape[0]} rows, need {minimum}")
    return rows


def estimate_mean(ds: LabeledDataset, k: int) -> np.ndarray:
    return _class_rows(ds, k).mean(axis=0)


def scatter(rows: np.ndarray) -> np.ndarray:
    """Sum of outer products of deviations from the row mean (two-pass)."""
    dev = rows - rows.mean(axis=0)
    s = dev.T @ dev
    return 0.5 * (s + s.T)


def estimate_cov(ds: LabeledDataset, k: int, mode: CovMode = "unbiased") -> np.ndarray:
    if mode not in ("mle", "unbiased"):
        raise ValueError(f"unknown covariance mode {mode!r}")
    rows = _class_rows(ds, k, 2 if mode == "unbiased" else 1)
    divisor = rows.shape[0] - (1 if mode == "unbiased" else 0)
    return scatter(rows) / divisor


def pooled_cov(per_class: Iterable[tuple[int, np.ndarray]]) -> np.ndarray:
    """Sample-size weighted average ``sum n_k S_k / sum n_k``."""
    items = [(n_k, np.atleast_2d(np.asarray(cov, dtype=float))) for n_k, cov in per_class]
    if not items:
        raise EmptyDataset("no classes to pool")
    shape = items[0][1].shape
    for n_k, cov in items:
        if n_k < 1:
            raise InsufficientSamples("every class needs n_k >= 1")
        if cov.shape != shape:
            raise DimensionMismatch(f"covariance shapes {shape} and {cov.shape} differ")
    total = sum(n_k for n_k, _ in items)
    # weights n_k / n keep a single class bit-exact
    return sum((n_k / total) * cov for n_k, cov in items)


def estimate_feature_params(ds: LabeledDataset, k: int, j: int) -> tuple[float, float]:
    """Mean and unbiased variance of feature ``j`` within class ``k``."""
    rows = _class_rows(ds, k, 2)
    col = rows[:, j]
    mu = col.mean()
    var = float(np.sum((col - mu) ** 2) / (col.shape[0] - 1))
    return float(mu), var
