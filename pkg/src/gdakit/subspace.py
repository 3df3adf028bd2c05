"""Metric-learning view of discriminant analysis and the Fisher direction.

Whitening maps a class to identity covariance, after which its quadratic
score is a plain Euclidean distance to the whitened mean.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateMeans, DimensionMismatch, NotDistanceMatrix, NotPositiveDefinite
from .estimation import LabeledDataset, estimate_cov, estimate_mean, pooled_cov
from .gaussian import GaussianParams
from .linalg import PIVOT_RTOL, as_sym, generalized_eig_max, sym_eig


@dataclass(frozen=True)
class WhiteningTransform:
    """``phi(x) = diag(scale) @ rotation @ x`` with ``rotation = U^T``."""

    scale: np.ndarray
    rotation: np.ndarray
    source: np.ndarray

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return (x @ self.rotation.T) * self.scale

    @property
    def matrix(self) -> np.ndarray:
        return self.scale[:, None] * self.rotation


def whitening(p: GaussianParams) -> WhiteningTransform:
    """Whitening map ``Lambda^{-1/2} U^T`` from the eigendecomposition of the covariance."""
    pair = sym_eig(p.cov)
    if pair.values[-1] <= PIVOT_RTOL * max(pair.values[0], 0.0):
        raise NotPositiveDefinite(f"smallest eigenvalue {pair.values[-1]:.3e} is not positive")
    return WhiteningTransform(
        scale=1.0 / np.sqrt(pair.values),
        rotation=pair.vectors.T.copy(),
        source=p.cov,
    )


def mahalanobis_sq(p: GaussianParams, x):
    return p.mahalanobis_sq(x)


def double_center(D, atol: float = 1e-12) -> np.ndarray:
    """Kernel ``-1/2 H D H`` from a squared-distance matrix, ``H = I - 11^T / n``."""
    D = np.asarray(D, dtype=float)
    if D.ndim != 2 or D.shape[0] != D.shape[1]:
        raise NotDistanceMatrix(f"distance matrix must be square, got {D.shape}")
    scale = max(1.0, float(np.max(np.abs(D)))) if D.size else 1.0
    if np.any(np.abs(D - D.T) > atol * scale):
        raise NotDistanceMatrix("distance matrix is not symmetric")
    if np.any(np.abs(np.diag(D)) > atol * scale):
        raise NotDistanceMatrix("distance matrix has a nonzero diagonal")
    if np.any(D < -atol * scale):
        raise NotDistanceMatrix("distance matrix has negative entries")
    # H D H without forming H: subtract row and column means, add grand mean
    row = D.mean(axis=1, keepdims=True)
    col = D.mean(axis=0, keepdims=True)
    K = -0.5 * (D - row - col + D.mean())
    return 0.5 * (K + K.T)


@dataclass(frozen=True)
class FisherDirection:
    u: np.ndarray
    criterion_value: float


def fisher_ratio(u, mu1, mu2, cov1, cov2) -> float:
    """``(u^T (mu2 - mu1))^2 / u^T (cov1 + cov2) u``."""
    u = np.asarray(u, dtype=float)
    diff = np.asarray(mu2, dtype=float) - np.asarray(mu1, dtype=float)
    within = np.asarray(cov1, dtype=float) + np.asarray(cov2, dtype=float)
    return float((u @ diff) ** 2 / (u @ within @ u))


def fisher_direction(mu1, mu2, cov1, cov2) -> FisherDirection:
    """Top generalized eigenvector of (between scatter, summed within scatter)."""
    mu1 = np.atleast_1d(np.asarray(mu1, dtype=float))
    mu2 = np.atleast_1d(np.asarray(mu2, dtype=float))
    if mu1.shape != mu2.shape:
        raise DimensionMismatch("means differ in dimension")
    diff = mu2 - mu1
    if not np.any(diff):
        raise DegenerateMeans("equal class means leave the Fisher direction undefined")
    within = as_sym(cov1) + as_sym(cov2)
    between = np.outer(diff, diff)
    _, u = generalized_eig_max(between, within)
    return FisherDirection(u=u, criterion_value=fisher_ratio(u, mu1, mu2, cov1, cov2))


@dataclass(frozen=True)
class EquivalenceReport:
    cosine: float
    scale: float
    fda_direction: np.ndarray
    lda_normal: np.ndarray


def lda_fda_equivalence(ds: LabeledDataset) -> EquivalenceReport:
    """Compare the Fisher direction under a pooled covariance with the LDA normal.

    ``scale`` is ``||lda_normal|| / ||fda_direction||`` with the sign of their dot
    product; the FDA direction has unit length.
    """
    if ds.n_classes != 2:
        raise DimensionMismatch(f"need exactly two classes, got {ds.n_classes}")
    mu1, mu2 = estimate_mean(ds, 0), estimate_mean(ds, 1)
    counts = ds.class_counts
    pooled = pooled_cov(zip(counts, (estimate_cov(ds, k) for k in (0, 1))))
    fda = fisher_direction(mu1, mu2, pooled, pooled).u
    lda = GaussianParams(mu1, pooled).inv @ (mu2 - mu1)
    cos = float(fda @ lda / (np.linalg.norm(fda) * np.linalg.norm(lda)))
    return EquivalenceReport(
        cosine=abs(cos),
        scale=float(np.sign(cos) * np.linalg.norm(lda)),
        fda_direction=fda,
        lda_normal=lda,
    )
