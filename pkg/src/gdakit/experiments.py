"""The four simulation families: equal, small and different class sizes, multimodal data.

Each run fits LDA, QDA, GNB and a plug-in Bayes classifier, rasterises their
decision regions and measures held-out accuracy on a stratified 80/20 split.

Report schema (``schema_version`` 1)::

    {
      "schema_version": 1,
      "experiment": str, "seed": int, "resolution": float, "ridge": float,
      "scenarios": [
        {
          "id": str,
          "class_counts": [int, ...],
          "bounds": [xmin, xmax, ymin, ymax],
          "grid_shape": [rows, cols],
          "classifiers": {
            "<family>": {
              "cell_counts": [int, ...],
              "heldout_accuracy": float,
              "files": {"csv": str, "ppm": str}     # only when written
            }, ...
          },
          "agreement": {"<fam1>-<fam2>": percent, ...}
        }, ...
      ]
    }

Grids come from models fit on the whole scenario; accuracies from models fit
on the training split only.
"""
from __future__ import annotations

import itertools
import json
from pathlib import Path

import numpy as np

from .datagen import ScenarioSpec, builtin_scenario, generate
from .discriminant import FittedClassifier, fit, make_bayes, predict
from .estimation import LabeledDataset, estimate_priors
from .gaussian import GaussianParams
from .grid import agreement, compute_grid, default_bounds, write_csv, write_ppm
from .mixture import EMOptions, em_fit

EXPERIMENTS = {
    "equal-sizes": ("a", "b"),
    "small-sizes": ("c", "d"),
    "different-sizes": ("e", "f"),
    "multimodal": ("g",),
}
CLASSIFIERS = ("lda", "qda", "gnb", "bayes")
SCHEMA_VERSION = 1


def stratified_split(ds: LabeledDataset, rng: np.random.Generator, test_frac: float = 0.2):
    """Per-class shuffled split; each class with two or more rows keeps at least one for testing."""
    train, test = [], []
    for k in range(ds.n_classes):
        idx = np.flatnonzero(ds.y == k)
        idx = idx[rng.permutation(idx.shape[0])]
        n_test = int(round(test_frac * idx.shape[0]))
        if idx.shape[0] >= 2:
            n_test = min(max(n_test, 1), idx.shape[0] - 1)
        test.append(idx[:n_test])
        train.append(idx[n_test:])
    tr = np.sort(np.concatenate(train))
    te = np.sort(np.concatenate(test))
    return (
        LabeledDataset(ds.X[tr], ds.y[tr], ds.n_classes),
        LabeledDataset(ds.X[te], ds.y[te], ds.n_classes),
    )


def bayes_for(spec: ScenarioSpec, ds: LabeledDataset, rng: np.random.Generator, mixture_k: int = 2) -> FittedClassifier:
    """Plug-in Bayes with estimated priors and generating densities.

    A multimodal class gets a ``mixture_k``-component EM fit on its rows instead
    of its generating density; unimodal classes use the exact Gaussian.
    """
    priors = estimate_priors(ds)
    likelihoods = []
    for k, cls in enumerate(spec.classes):
        if len(cls) > 1:
            likelihoods.append(em_fit(ds.rows(k), mixture_k, rng, EMOptions()))
        else:
            likelihoods.append(GaussianParams(cls[0].mean, cls[0].cov))
    return make_bayes(priors, likelihoods)


def fit_all(spec: ScenarioSpec, ds: LabeledDataset, rng: np.random.Generator, ridge: float = 0.0):
    models = {fam: fit(ds, fam, ridge=ridge) for fam in ("lda", "qda", "gnb")}
    models["bayes"] = bayes_for(spec, ds, rng)
    return models


def accuracy(clf: FittedClassifier, ds: LabeledDataset) -> float:
    return float(np.mean(np.asarray(predict(clf, ds.X)) == ds.y))


def run_scenario(
    spec: ScenarioSpec,
    resolution: float = 0.1,
    ridge: float = 0.0,
    out_dir: Path | None = None,
) -> dict:
    ds = generate(spec)
    rng = np.random.Generator(np.random.PCG64([spec.seed, 1]))
    full = fit_all(spec, ds, rng, ridge)
    train, test = stratified_split(ds, rng)
    held = fit_all(spec, train, rng, ridge)

    bounds = default_bounds(ds)
    grids = {fam: compute_grid(full[fam], bounds, resolution) for fam in CLASSIFIERS}
    shape = grids["lda"].shape
    entry = {
        "id": spec.id,
        "class_counts": [int(c) for c in ds.class_counts],
        "bounds": list(bounds),
        "grid_shape": list(shape),
        "classifiers": {},
        "agreement": {},
    }
    for fam in CLASSIFIERS:
        info = {
            "cell_counts": [int(c) for c in grids[fam].counts(ds.n_classes)],
            "heldout_accuracy": accuracy(held[fam], test),
        }
        if out_dir is not None:
            stem = out_dir / f"{spec.id}_{fam}"
            write_csv(grids[fam], stem.with_suffix(".csv"))
            write_ppm(grids[fam], stem.with_suffix(".ppm"))
            info["files"] = {"csv": stem.with_suffix(".csv").name, "ppm": stem.with_suffix(".ppm").name}
        entry["classifiers"][fam] = info
    for a, b in itertools.combinations(CLASSIFIERS, 2):
        entry["agreement"][f"{a}-{b}"] = agreement(grids[a], grids[b])
    return entry


def run_experiment(
    name: str,
    seed: int = 0,
    resolution: float = 0.1,
    ridge: float = 0.0,
    out_dir=None,
) -> dict:
    if name not in EXPERIMENTS:
        raise KeyError(f"unknown experiment {name!r}; choose one of {', '.join(EXPERIMENTS)}")
    out = Path(out_dir) if out_dir is not None else None
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
    report = {
        "schema_version": SCHEMA_VERSION,
        "experiment": name,
        "seed": seed,
        "resolution": resolution,
        "ridge": ridge,
        "scenarios": [
            run_scenario(builtin_scenario(sid, seed), resolution, ridge, out)
            for sid in EXPERIMENTS[name]
        ],
    }
    if out is not None:
        (out / "report.json").write_text(json.dumps(report, indent=2))
    return report

