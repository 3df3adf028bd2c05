"""Gaussian discriminant classifiers: LDA, QDA, Gaussian naive Bayes, plug-in Bayes.

Every classifier scores a point by one discriminant value per class and
predicts the argmax. Scores live in the log domain so densities never
underflow; ties go to the lowest class index.
"""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass
from functools import cached_property
from typing import Literal, Protocol, Sequence

import numpy as np

from .errors import DimensionMismatch, GdaError, NotBinary, PriorSumInvalid
from .estimation import (
    CovMode,
    LabeledDataset,
    estimate_cov,
    estimate_mean,
    estimate_priors,
    pooled_cov,
)
from .gaussian import GaussianParams, univariate_log_pdf
from .mixture import MixtureModel

Family = Literal["lda", "qda", "gnb", "bayes"]
FAMILIES = ("lda", "qda", "gnb", "bayes")
PRIOR_TOL = 1e-12
VARIANCE_FLOOR_REL = 1e-12


class Likelihood(Protocol):
    dim: int

    def log_pdf(self, x): ...


class DiagonalGaussian:
    """Independent univariate Gaussians, one per feature."""

    __slots__ = ("means", "variances")

    def __init__(self, means, variances):
        self.means = np.atleast_1d(np.asarray(means, dtype=float))
        self.variances = np.atleast_1d(np.asarray(variances, dtype=float))
        if self.means.shape != self.variances.shape or self.means.ndim != 1:
            raise DimensionMismatch("means and variances must be equal-length vectors")
        if np.any(self.variances <= 0):
            raise ValueError("variances must be positive")
        self.means.setflags(write=False)
        self.variances.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.means.shape[0]

    def log_pdf(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.dim:
            raise DimensionMismatch(f"point of dimension {x.shape[-1]}, model has {self.dim}")
        out = np.sum(univariate_log_pdf(x, self.means, self.variances), axis=-1)
        return float(out) if np.ndim(out) == 0 else out

    def __repr__(self) -> str:
        return f"DiagonalGaussian(means={self.means.tolist()}, variances={self.variances.tolist()})"


@dataclass(frozen=True)
class ClassModel:
    prior: float
    likelihood: Likelihood


@dataclass(frozen=True)
class FittedClassifier:
    """Per-class priors and likelihoods plus the family that decides the scoring rule.

    For LDA every class likelihood is a GaussianParams sharing ``shared_cov``.
    """

    family: Family
    classes: tuple[ClassModel, ...]
    shared_cov: np.ndarray | None = None
    labels: tuple[int, ...] = ()

    def __post_init__(self):
        classes = tuple(self.classes)
        object.__setattr__(self, "classes", classes)
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if len(classes) < 2:
            raise ValueError("a classifier needs at least two classes")
        priors = np.array([c.prior for c in classes])
        if np.any(priors <= 0) or abs(priors.sum() - 1.0) > PRIOR_TOL:
            raise PriorSumInvalid(f"priors must be positive and sum to 1, got {priors.tolist()}")
        dims = {c.likelihood.dim for c in classes}
        if len(dims) != 1:
            raise DimensionMismatch(f"class likelihoods disagree on dimension: {dims}")
        if self.family == "lda":
            if self.shared_cov is None:
                raise ValueError("LDA requires a shared covariance")
            if not all(isinstance(c.likelihood, GaussianParams) for c in classes):
                raise ValueError("LDA class likelihoods must be GaussianParams")
        elif self.shared_cov is not None:
            raise ValueError(f"{self.family} does not take a shared covariance")
        if self.family == "qda" and not all(isinstance(c.likelihood, GaussianParams) for c in classes):
            raise ValueError("QDA class likelihoods must be GaussianParams")
        if self.family == "gnb" and not all(isinstance(c.likelihood, DiagonalGaussian) for c in classes):
            raise ValueError("GNB class likelihoods must be DiagonalGaussian")
        if not self.labels:
            object.__setattr__(self, "labels", tuple(range(len(classes))))
        elif len(self.labels) != len(classes):
            raise ValueError("one label per class required")

    @property
    def n_classes(self) -> int:
        return len(self.classes)

    @property
    def dim(self) -> int:
        return self.classes[0].likelihood.dim

    @cached_property
    def log_priors(self) -> np.ndarray:
        return np.log([c.prior for c in self.classes])

    @cached_property
    def _lda_terms(self) -> tuple[np.ndarray, np.ndarray]:
        inv = self.classes[0].likelihood.inv
        means = np.array([c.likelihood.mean for c in self.classes])
        weights = means @ inv  # rows are (Sigma^{-1} mu_k)^T
        offsets = -0.5 * np.sum(weights * means, axis=1) + self.log_priors
        return weights, offsets

    def score(self, x) -> np.ndarray:
        return score(self, x)

    def predict(self, x):
        return predict(self, x)


def _as_points(clf: FittedClassifier, x) -> tuple[np.ndarray, bool]:
    x = np.asarray(x, dtype=float)
    if x.ndim == 0 and clf.dim == 1:
        x = x.reshape(1)
    single = x.ndim == 1
    X = np.atleast_2d(x)
    if X.ndim != 2 or X.shape[1] != clf.dim:
        raise DimensionMismatch(f"points of dimension {X.shape[-1]}, model has {clf.dim}")
    return X, single


def score(clf: FittedClassifier, x) -> np.ndarray:
    """Discriminant scores ``delta_k(x)``, shape ``(K,)`` for a point or ``(n, K)``."""
    X, single = _as_points(clf, x)
    if clf.family == "lda":
        weights, offsets = clf._lda_terms
        out = X @ weights.T + offsets
    elif clf.family == "qda":
        cols = [
            -0.5 * c.likelihood.logdet - 0.5 * c.likelihood.mahalanobis_sq(X)
            for c in clf.classes
        ]
        out = np.stack(cols, axis=1) + clf.log_priors
    else:
        cols = [np.asarray(c.likelihood.log_pdf(X)) for c in clf.classes]
        out = np.stack(cols, axis=1) + clf.log_priors
    return out[0] if single else out


def predict(clf: FittedClassifier, x):
    """Argmax of the scores, ties to the lowest index, mapped through ``labels``."""
    s = score(clf, x)
    idx = np.argmax(s, axis=-1)
    labels = np.asarray(clf.labels)
    return int(labels[idx]) if np.ndim(idx) == 0 else labels[idx]


def _floor_variances(variances: np.ndarray, spans: np.ndarray, k: int) -> np.ndarray:
    floor = VARIANCE_FLOOR_REL * np.where(spans > 0, spans, 1.0) ** 2
    low = variances < floor
    if np.any(low):
        warnings.warn(
            f"class {k}: zero-variance feature(s) {np.flatnonzero(low).tolist()} floored",
            RuntimeWarning,
            stacklevel=3,
        )
        variances = np.where(low, floor, variances)
    return variances


def fit(
    ds: LabeledDataset,
    family: Family,
    cov_mode: CovMode = "unbiased",
    ridge: float = 0.0,
) -> FittedClassifier:
    """Estimate priors, means and covariances from labelled data.

    ``ridge`` adds ``ridge * I`` to every estimated covariance (or variance).
    The plug-in Bayes family is built with :func:`make_bayes` instead.
    """
    if family == "bayes":
        raise ValueError("the Bayes family is not fit from data; use make_bayes")
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}")
    if ds.n_classes < 2:
        raise ValueError("need at least two classes")
    priors = estimate_priors(ds)
    means = [estimate_mean(ds, k) for k in range(ds.n_classes)]
    covs = [estimate_cov(ds, k, cov_mode) for k in range(ds.n_classes)]
    eye = np.eye(ds.dim)
    if family == "qda":
        return qda_from_params(priors, means, [c + ridge * eye for c in covs])
    if family == "lda":
        counts = ds.class_counts
        shared = pooled_cov(zip(counts, covs)) + ridge * eye
        return lda_from_params(priors, means, shared)
    spans = np.ptp(ds.X, axis=0)
    variances = [
        _floor_variances(np.diag(c) + ridge, spans, k) for k, c in enumerate(covs)
    ]
    return gnb_from_params(priors, means, variances)


def qda_from_params(priors, means, covs) -> FittedClassifier:
    classes = tuple(
        ClassModel(float(p), GaussianParams(m, c)) for p, m, c in zip(priors, means, covs)
    )
    return FittedClassifier("qda", classes)


def lda_from_params(priors, means, shared_cov) -> FittedClassifier:
    shared = GaussianParams(means[0], shared_cov)
    classes = tuple(
        ClassModel(float(p), GaussianParams(m, shared.cov)) for p, m in zip(priors, means)
    )
    return FittedClassifier("lda", classes, shared_cov=shared.cov)


def gnb_from_params(priors, means, variances) -> FittedClassifier:
    classes = tuple(
        ClassModel(float(p), DiagonalGaussian(m, v)) for p, m, v in zip(priors, means, variances)
    )
    return FittedClassifier("gnb", classes)


def make_bayes(priors: Sequence[float], likelihoods: Sequence[Likelihood]) -> FittedClassifier:
    """Plug-in Bayes classifier scoring ``ln pi_k + ln f_k(x)`` for arbitrary densities."""
    priors = np.asarray(priors, dtype=float)
    if priors.shape != (len(likelihoods),):
        raise DimensionMismatch("one prior per likelihood required")
    if np.any(priors <= 0) or abs(priors.sum() - 1.0) > PRIOR_TOL:
        raise PriorSumInvalid(f"priors must be positive and sum to 1, got {priors.tolist()}")
    classes = tuple(ClassModel(float(p), f) for p, f in zip(priors, likelihoods))
    return FittedClassifier("bayes", classes)


def binary_coefficients(clf: FittedClassifier) -> tuple[np.ndarray, np.ndarray, float]:
    """``(A, b, c)`` with ``delta(x) = x^T A x + b^T x + c`` for a two-class LDA/QDA.

    The quadratic term is ``Sigma_1^{-1} - Sigma_2^{-1}``; it vanishes for LDA.
    """
    if clf.n_classes != 2:
        raise NotBinary(f"binary discriminant needs 2 classes, got {clf.n_classes}")
    if clf.family not in ("lda", "qda"):
        raise NotBinary(f"closed-form binary discriminant is defined for LDA/QDA, not {clf.family}")
    g1, g2 = (c.likelihood for c in clf.classes)
    p1, p2 = (c.prior for c in clf.classes)
    log_ratio = 2.0 * math.log(p2 / p1)
    if clf.family == "lda":
        inv = g1.inv
        A = np.zeros_like(inv)
        b = 2.0 * inv @ (g2.mean - g1.mean)
        c = g1.mean @ inv @ g1.mean - g2.mean @ inv @ g2.mean + log_ratio
    else:
        A = g1.inv - g2.inv
        b = 2.0 * (g2.inv @ g2.mean - g1.inv @ g1.mean)
        c = (
            g1.mean @ g1.inv @ g1.mean
            - g2.mean @ g2.inv @ g2.mean
            + (g1.logdet - g2.logdet)
            + log_ratio
        )
    return A, b, float(c)


def binary_delta(clf: FittedClassifier, x):
    """``delta(x) = 2 (delta_2(x) - delta_1(x))``; negative means the first class."""
    A, b, c = binary_coefficients(clf)
    X, single = _as_points(clf, x)
    out = np.einsum("ni,ij,nj->n", X, A, X) + X @ b + c
    return float(out[0]) if single else out


def log_posterior_ratio(clf: FittedClassifier, x):
    """``ln(pi_2 f_2(x)) - ln(pi_1 f_1(x))`` from the full class densities."""
    if clf.n_classes != 2:
        raise NotBinary(f"likelihood ratio needs 2 classes, got {clf.n_classes}")
    X, single = _as_points(clf, x)
    c1, c2 = clf.classes
    out = (math.log(c2.prior) + np.asarray(c2.likelihood.log_pdf(X))) - (
        math.log(c1.prior) + np.asarray(c1.likelihood.log_pdf(X))
    )
    return float(out[0]) if single else out


def lrt_classify(clf: FittedClassifier, x, t: float = 1.0):
    """Second class iff the posterior ratio is at least ``t``."""
    if not t > 0:
        raise ValueError("threshold t must be positive")
    r = log_posterior_ratio(clf, x)
    pick = np.asarray(r) >= math.log(t)
    labels = np.asarray(clf.labels)
    out = labels[pick.astype(int)]
    return int(out) if np.ndim(out) == 0 else out


# -- serialization ----------------------------------------------------------

def _gaussian_doc(g: GaussianParams) -> dict:
    return {"mean": g.mean.tolist(), "cov": g.cov.tolist()}


def _likelihood_doc(f) -> dict:
    if isinstance(f, GaussianParams):
        return _gaussian_doc(f)
    if isinstance(f, DiagonalGaussian):
        return {"feature_params": {"means": f.means.tolist(), "variances": f.variances.tolist()}}
    if isinstance(f, MixtureModel):
        return {
            "mixture": {
                "weights": f.weights.tolist(),
                "components": [_gaussian_doc(c) for c in f.components],
            }
        }
    raise GdaError(f"cannot serialize likelihood of type {type(f).__name__}")


def to_dict(clf: FittedClassifier) -> dict:
    doc = {
        "family": clf.family,
        "dim": clf.dim,
        "labels": list(clf.labels),
        "priors": [c.prior for c in clf.classes],
    }
    if clf.family == "lda":
        doc["shared_cov"] = clf.shared_cov.tolist()
        doc["classes"] = [{"mean": c.likelihood.mean.tolist()} for c in clf.classes]
    else:
        doc["classes"] = [_likelihood_doc(c.likelihood) for c in clf.classes]
    return doc


def _likelihood_from(doc: dict):
    if "mixture" in doc:
        m = doc["mixture"]
        return MixtureModel(
            np.array(m["weights"], dtype=float),
            tuple(GaussianParams(c["mean"], c["cov"]) for c in m["components"]),
        )
    if "feature_params" in doc:
        fp = doc["feature_params"]
        return DiagonalGaussian(fp["means"], fp["variances"])
    return GaussianParams(doc["mean"], doc["cov"])


def from_dict(doc: dict) -> FittedClassifier:
    family = doc["family"]
    priors = [float(p) for p in doc["priors"]]
    labels = tuple(int(v) for v in doc.get("labels", range(len(priors))))
    if family == "lda":
        shared = np.array(doc["shared_cov"], dtype=float)
        classes = tuple(
            ClassModel(p, GaussianParams(c["mean"], shared)) for p, c in zip(priors, doc["classes"])
        )
        return FittedClassifier("lda", classes, shared_cov=as_read_only(shared), labels=labels)
    classes = tuple(ClassModel(p, _likelihood_from(c)) for p, c in zip(priors, doc["classes"]))
    return FittedClassifier(family, classes, labels=labels)


def as_read_only(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def dumps(clf: FittedClassifier) -> str:
    return json.dumps(to_dict(clf), indent=2)


def loads(text: str) -> FittedClassifier:
    return from_dict(json.loads(text))
