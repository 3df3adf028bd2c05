"""Gaussian densities, sampling and the standard normal CDF.

Sampling uses Box-Muller on uniforms from numpy's PCG64 bit generator
(``numpy.random.Generator(PCG64(seed))``), so a seed fully determines a stream.
"""
from __future__ import annotations

import math

import numpy as np
from scipy.special import erfc

from .errors import DimensionMismatch
from .linalg import as_sym, cholesky, inverse_and_logdet, solve_lower

LOG_2PI = math.log(2.0 * math.pi)


def make_rng(seed: int | None) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def standard_normals(rng: np.random.Generator, shape) -> np.ndarray:
    """I.i.d. N(0, 1) variates by the Box-Muller transform."""
    shape = (shape,) if isinstance(shape, int) else tuple(shape)
    count = int(np.prod(shape))
    pairs = (count + 1) // 2
    u1 = 1.0 - rng.random(pairs)  # (0, 1], keeps log finite
    u2 = rng.random(pairs)
    r = np.sqrt(-2.0 * np.log(u1))
    theta = 2.0 * np.pi * u2
    z = np.empty(2 * pairs)
    z[0::2] = r * np.cos(theta)
    z[1::2] = r * np.sin(theta)
    return z[:count].reshape(shape)


class GaussianParams:
    """Mean and covariance of a multivariate normal with cached factorisations.

    Construction fails with NotPositiveDefinite unless ``cov`` is SPD.
    Instances are treated as immutable.
    """

    __slots__ = ("mean", "cov", "chol", "inv", "logdet")

    def __init__(self, mean, cov):
        mean = np.atleast_1d(np.asarray(mean, dtype=float))
        cov = as_sym(cov)
        if mean.ndim != 1 or cov.shape[0] != mean.shape[0]:
            raise DimensionMismatch(
                f"mean of length {mean.shape} does not fit covariance {cov.shape}"
            )
        self.mean = mean
        self.cov = cov
        self.chol = cholesky(cov)
        self.inv, self.logdet = inverse_and_logdet(cov)
        for arr in (self.mean, self.cov, self.chol, self.inv):
            arr.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.mean.shape[0]

    def __repr__(self) -> str:
        return f"GaussianParams(mean={self.mean.tolist()}, cov={self.cov.tolist()})"

    def _check(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.ndim == 0 and self.dim == 1:
            x = x.reshape(1)
        if x.shape[-1] != self.dim:
            raise DimensionMismatch(f"point of dimension {x.shape[-1]}, model has {self.dim}")
        return x

    def mahalanobis_sq(self, x) -> np.ndarray | float:
        """``(x - mean)^T cov^{-1} (x - mean)``, via the Cholesky factor."""
        x = self._check(x)
        diff = np.atleast_2d(x) - self.mean
        z = solve_lower(self.chol, diff.T)
        out = np.sum(z * z, axis=0)
        return float(out[0]) if x.ndim == 1 else out

    def log_pdf(self, x) -> np.ndarray | float:
        """Log density at a point ``(d,)`` or at each row of ``(n, d)``."""
        m = self.mahalanobis_sq(x)
        return -0.5 * (self.dim * LOG_2PI + self.logdet + m)

    def pdf(self, x) -> np.ndarray | float:
        return np.exp(self.log_pdf(x))

    def sample(self, count: int, rng: np.random.Generator) -> np.ndarray:
        """``count`` rows of ``mean + L z`` with ``z`` standard normal."""
        if count < 1:
            raise ValueError("count must be at least 1")
        z = standard_normals(rng, (count, self.dim))
        return self.mean + z @ self.chol.T


def log_pdf(p: GaussianParams, x):
    return p.log_pdf(x)


def sample(p: GaussianParams, count: int, rng: np.random.Generator) -> np.ndarray:
    return p.sample(count, rng)


def univariate_log_pdf(x, mean, var):
    """Elementwise log N(x; mean, var); broadcasts like numpy."""
    x = np.asarray(x, dtype=float)
    return -0.5 * (LOG_2PI + np.log(var) + (x - mean) ** 2 / var)


def std_normal_cdf(z):
    """Standard normal CDF, Phi(z) = erfc(-z / sqrt 2) / 2."""
    out = 0.5 * erfc(-np.asarray(z, dtype=float) / math.sqrt(2.0))
    return float(out) if np.ndim(out) == 0 else out
