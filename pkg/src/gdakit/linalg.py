"""Dense kernels for small symmetric matrices.

Everything here works on plain ``numpy`` arrays and targets ``d`` up to about
16: cyclic Jacobi for the eigenproblem, an unpivoted Cholesky for SPD
factorisations, and the Cholesky reduction of the symmetric-definite
generalized eigenproblem.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NoConvergence, NotPositiveDefinite

PIVOT_RTOL = 1e-12
JACOBI_MAX_SWEEPS = 100
JACOBI_TOL = 1e-14


def as_sym(a) -> np.ndarray:
    """Return ``(A + A^T) / 2`` as a float array, checking that A is square."""
    a = np.array(a, dtype=float)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise DimensionMismatch(f"expected a non-empty square matrix, got shape {a.shape}")
    return 0.5 * (a + a.T)


@dataclass(frozen=True)
class EigenPair:
    """Eigenvalues in descending order with matching orthonormal columns."""

    values: np.ndarray
    vectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.vectors * self.values) @ self.vectors.T


def _sign_fix(v: np.ndarray) -> np.ndarray:
    # first component that is not roundoff-sized must be positive
    scale = np.max(np.abs(v))
    if scale == 0.0:
        return v
    idx = np.flatnonzero(np.abs(v) > 1e-12 * scale)[0]
    return -v if v[idx] < 0 else v


def cholesky(a) -> np.ndarray:
    """Lower-triangular ``L`` with ``L @ L.T == A``.

    Raises NotPositiveDefinite when a pivot falls below ``1e-12`` times the
    largest diagonal entry.
    """
    a = as_sym(a)
    d = a.shape[0]
    tol = PIVOT_RTOL * max(float(np.max(np.diag(a))), 0.0)
    L = np.zeros_like(a)
    for j in range(d):
        pivot = a[j, j] - L[j, :j] @ L[j, :j]
        if not pivot > tol or not np.isfinite(pivot):
            raise NotPositiveDefinite(
                f"pivot {pivot:.3e} at index {j} is not above tolerance {tol:.3e}"
            )
        L[j, j] = np.sqrt(pivot)
        L[j + 1 :, j] = (a[j + 1 :, j] - L[j + 1 :, :j] @ L[j, :j]) / L[j, j]
    return L


def solve_lower(L: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Forward substitution for ``L x = b``; ``b`` may be a vector or a matrix."""
    b = np.asarray(b, dtype=float)
    x = np.array(b, dtype=float, copy=True)
    for i in range(L.shape[0]):
        x[i] = (b[i] - L[i, :i] @ x[:i]) / L[i, i]
    return x


def solve_upper(U: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Back substitution for ``U x = b``."""
    b = np.asarray(b, dtype=float)
    x = np.array(b, dtype=float, copy=True)
    n = U.shape[0]
    for i in range(n - 1, -1, -1):
        x[i] = (b[i] - U[i, i + 1 :] @ x[i + 1 :]) / U[i, i]
    return x


def sym_eig(a) -> EigenPair:
    """Eigendecomposition of a symmetric matrix by cyclic Jacobi sweeps."""
    a = as_sym(a)
    d = a.shape[0]
    A = a.copy()
    V = np.eye(d)
    norm = np.linalg.norm(a)
    target = JACOBI_TOL * norm

    mask = ~np.eye(d, dtype=bool)

    def off(m: np.ndarray) -> float:
        return float(np.linalg.norm(m[mask]))

    converged = off(A) <= target
    sweeps = 0
    while not converged:
        if sweeps >= JACOBI_MAX_SWEEPS:
            raise NoConvergence(
                f"off-diagonal mass {off(A):.3e} after {sweeps} sweeps exceeds {target:.3e}"
            )
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = A[p, q]
                g = 100.0 * abs(apq)
                if abs(A[p, p]) + g == abs(A[p, p]) and abs(A[q, q]) + g == abs(A[q, q]):
                    # below roundoff of both diagonal entries
                    A[p, q] = A[q, p] = 0.0
                    continue
                h = A[q, q] - A[p, p]
                if abs(h) + g == abs(h):
                    t = apq / h
                else:
                    theta = 0.5 * h / apq
                    t = 1.0 / (abs(theta) + np.sqrt(theta * theta + 1.0))
                    if theta < 0.0:
                        t = -t
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                # A <- J^T A J with J the (p, q) rotation
                col_p = A[:, p].copy()
                col_q = A[:, q]
                A[:, p] = c * col_p - s * col_q
                A[:, q] = s * col_p + c * col_q
                row_p = A[p, :].copy()
                row_q = A[q, :]
                A[p, :] = c * row_p - s * row_q
                A[q, :] = s * row_p + c * row_q
                A[p, q] = A[q, p] = 0.0
                vp = V[:, p].copy()
                vq = V[:, q]
                V[:, p] = c * vp - s * vq
                V[:, q] = s * vp + c * vq
        sweeps += 1
        converged = off(A) <= target

    values = np.diag(A).copy()
    order = np.argsort(-values, kind="stable")
    values = values[order]
    V = V[:, order]
    for i in range(d):
        V[:, i] = _sign_fix(V[:, i])
    return EigenPair(values=values, vectors=V)


def inverse_and_logdet(a) -> tuple[np.ndarray, float]:
    """Return ``(A^{-1}, ln|A|)`` for an SPD matrix, both from its Cholesky factor."""
    L = cholesky(a)
    Linv = solve_lower(L, np.eye(L.shape[0]))
    inv = Linv.T @ Linv
    logdet = 2.0 * float(np.sum(np.log(np.diag(L))))
    return 0.5 * (inv + inv.T), logdet


def generalized_eig_max(a, b) -> tuple[float, np.ndarray]:
    """Top pair of ``A u = lam B u`` for symmetric A and SPD B.

    Reduces to the standard problem for ``L^{-1} A L^{-T}`` with ``B = L L^T``.
    The returned ``u`` has unit Euclidean norm and its first significant
    component positive.
    """
    a = as_sym(a)
    b = as_sym(b)
    if a.shape != b.shape:
        raise DimensionMismatch(f"shapes {a.shape} and {b.shape} differ")
    L = cholesky(b)
    Linv = solve_lower(L, np.eye(L.shape[0]))
    reduced = Linv @ a @ Linv.T
    pair = sym_eig(reduced)
    u = solve_upper(L.T, pair.vectors[:, 0])
    u = _sign_fix(u / np.linalg.norm(u))
    return float(pair.values[0]), u
