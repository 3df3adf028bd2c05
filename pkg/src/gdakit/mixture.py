"""Gaussian mixture likelihoods fitted by expectation-maximisation."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from .errors import DegenerateComponent, DimensionMismatch, NotPositiveDefinite, TooFewPoints
from .gaussian import GaussianParams
from .linalg import cholesky, sym_eig


@dataclass(frozen=True)
class MixtureModel:
    """Weighted sum of Gaussian components; weights sum to one."""

    weights: np.ndarray
    components: tuple[GaussianParams, ...]

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        comps = tuple(self.components)
        if w.shape != (len(comps),) or not comps:
            raise DimensionMismatch("need one positive weight per component")
        if np.any(w <= 0) or abs(w.sum() - 1.0) > 1e-12:
            raise ValueError(f"weights must be positive and sum to 1, got {w.tolist()}")
        if len({c.dim for c in comps}) != 1:
            raise DimensionMismatch("components have different dimensions")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "components", comps)

    @property
    def dim(self) -> int:
        return self.components[0].dim

    def component_log_pdfs(self, x) -> np.ndarray:
        """``ln w_k + ln f_k(x)``, shape ``(K,)`` or ``(n, K)``."""
        cols = [np.log(w) + c.log_pdf(x) for w, c in zip(self.weights, self.components)]
        return np.stack(cols, axis=-1)

    def log_pdf(self, x):
        out = logsumexp(self.component_log_pdfs(x), axis=-1)
        return float(out) if np.ndim(out) == 0 else out


def log_pdf_mix(m: MixtureModel, x):
    return m.log_pdf(x)


@dataclass(frozen=True)
class EMOptions:
    restarts: int = 5
    max_iter: int = 500
    tol: float = 1e-8  # per-point log-likelihood improvement
    floor_scale: float = 1e-6  # floor = floor_scale * trace(global cov) / d
    max_floor_hits: int = 10


@dataclass
class EMRun:
    model: MixtureModel
    log_likelihoods: list[float] = field(default_factory=list)
    n_iter: int = 0
    floor_hits: int = 0
    converged: bool = False


def _kmeanspp(points: np.ndarray, K: int, rng: np.random.Generator) -> np.ndarray:
    n = points.shape[0]
    centers = [points[rng.integers(n)]]
    d2 = np.sum((points - centers[0]) ** 2, axis=1)
    for _ in range(1, K):
        total = d2.sum()
        if total <= 0:
            idx = rng.integers(n)
        else:
            idx = rng.choice(n, p=d2 / total)
        centers.append(points[idx])
        d2 = np.minimum(d2, np.sum((points - points[idx]) ** 2, axis=1))
    return np.array(centers)


def _floored(cov: np.ndarray, floor: float) -> tuple[np.ndarray, bool]:
    try:
        # cheap certificate that every eigenvalue is already above the floor
        cholesky(cov - floor * np.eye(cov.shape[0]))
        return cov, False
    except NotPositiveDefinite:
        pass
    pair = sym_eig(cov)
    vals, vecs = pair.values, pair.vectors
    if vals.min() >= floor:
        return cov, False
    vals = np.maximum(vals, floor)
    out = (vecs * vals) @ vecs.T
    return 0.5 * (out + out.T), True


def _responsibilities(model: MixtureModel, X: np.ndarray) -> tuple[np.ndarray, float]:
    joint = model.component_log_pdfs(X)
    norm = logsumexp(joint, axis=1)
    return np.exp(joint - norm[:, None]), float(norm.sum())


def em_run(X: np.ndarray, K: int, rng: np.random.Generator, opts: EMOptions) -> EMRun:
    """One EM run from a k-means++ start; records the log-likelihood trace."""
    n, d = X.shape
    global_cov = np.atleast_2d(np.cov(X, rowvar=False, bias=True))
    floor = opts.floor_scale * np.trace(global_cov) / d
    start_cov, _ = _floored(global_cov, floor)
    model = MixtureModel(
        np.full(K, 1.0 / K),
        tuple(GaussianParams(mu, start_cov) for mu in _kmeanspp(X, K, rng)),
    )
    run = EMRun(model)
    resp, ll = _responsibilities(model, X)
    run.log_likelihoods.append(ll)
    for it in range(opts.max_iter):
        nk = resp.sum(axis=0)
        if np.any(nk < 1e-8 * n):
            raise DegenerateComponent(f"component weight vanished at iteration {it}")
        weights = nk / n
        weights = weights / weights.sum()
        comps = []
        for k in range(K):
            mu = resp[:, k] @ X / nk[k]
            dev = X - mu
            cov = (dev * resp[:, k, None]).T @ dev / nk[k]
            cov, hit = _floored(0.5 * (cov + cov.T), floor)
            run.floor_hits += hit
            try:
                comps.append(GaussianParams(mu, cov))
            except NotPositiveDefinite as exc:
                raise DegenerateComponent(f"component {k} collapsed: {exc}") from exc
        if run.floor_hits > opts.max_floor_hits:
            raise DegenerateComponent(
                f"covariance floor engaged {run.floor_hits} times; component collapsing"
            )
        model = MixtureModel(weights, tuple(comps))
        resp, new_ll = _responsibilities(model, X)
        run.log_likelihoods.append(new_ll)
        run.model = model
        run.n_iter = it + 1
        if (new_ll - ll) / n < opts.tol:
            run.converged = True
            break
        ll = new_ll
    return run


def _sorted(model: MixtureModel) -> MixtureModel:
    order = sorted(range(len(model.components)), key=lambda k: model.components[k].mean[0])
    return MixtureModel(model.weights[order], tuple(model.components[k] for k in order))


def em_fit_detailed(points, K: int, rng: np.random.Generator, opts: EMOptions | None = None) -> EMRun:
    """Best of ``opts.restarts`` EM runs by final log-likelihood."""
    opts = opts or EMOptions()
    X = np.asarray(points, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    n, d = X.shape
    if K < 1:
        raise ValueError("K must be positive")
    if n < K * (d + 1):
        raise TooFewPoints(f"{n} points cannot support {K} components in {d} dimensions")
    best = None
    failures = []
    for _ in range(max(1, opts.restarts)):
        try:
            run = em_run(X, K, rng, opts)
        except DegenerateComponent as exc:
            failures.append(str(exc))
            continue
        if best is None or run.log_likelihoods[-1] > best.log_likelihoods[-1]:
            best = run
    if best is None:
        raise DegenerateComponent("every EM restart degenerated: " + "; ".join(failures))
    best.model = _sorted(best.model)
    return best


def em_fit(points, K: int, rng: np.random.Generator, opts: EMOptions | None = None) -> MixtureModel:
    return em_fit_detailed(points, K, rng, opts).model
