"""Synthetic two-dimensional Gaussian scenarios and CSV input/output."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .errors import DataError, UnknownScenario
from .estimation import LabeledDataset
from .gaussian import GaussianParams, make_rng

MEANS = (
    np.array([-4.0, 4.0]),
    np.array([3.0, -3.0]),
    np.array([-3.0, 3.0]),
)
COVS = (
    np.array([[10.0, 1.0], [1.0, 5.0]]),
    np.array([[3.0, 0.0], [0.0, 4.0]]),
    np.array([[6.0, 1.5], [1.5, 4.0]]),
)


@dataclass(frozen=True)
class Component:
    mean: np.ndarray
    cov: np.ndarray
    count: int


@dataclass(frozen=True)
class ScenarioSpec:
    """Per-class lists of Gaussian components; a class with two components is bimodal."""

    id: str
    classes: tuple[tuple[Component, ...], ...]
    seed: int = 0

    @property
    def counts(self) -> tuple[int, ...]:
        return tuple(sum(c.count for c in cls) for cls in self.classes)

    def with_seed(self, seed: int) -> "ScenarioSpec":
        return replace(self, seed=seed)

    def true_likelihoods(self):
        """Generating density per class: a GaussianParams or a MixtureModel."""
        from .mixture import MixtureModel

        out = []
        for cls in self.classes:
            if len(cls) == 1:
                out.append(GaussianParams(cls[0].mean, cls[0].cov))
            else:
                total = sum(c.count for c in cls)
                out.append(
                    MixtureModel(
                        np.array([c.count / total for c in cls]),
                        tuple(GaussianParams(c.mean, c.cov) for c in cls),
                    )
                )
        return out


def _unimodal(indices, counts) -> tuple[tuple[Component, ...], ...]:
    return tuple((Component(MEANS[i], COVS[i], n),) for i, n in zip(indices, counts))


SCENARIO_IDS = ("a", "b", "c", "d", "e", "f", "g")


def builtin_scenario(id: str, seed: int = 0, pair: tuple[int, int] = (0, 1)) -> ScenarioSpec:
    """Scenarios (a)-(g) built from the three reference Gaussians.

    ``pair`` picks which two reference Gaussians the binary scenarios use.
    Scenario (g) puts two equal-size modes (references 0 and 1) in class 0
    and reference 2 in class 1.
    """
    three = (0, 1, 2)
    layouts = {
        "a": (three, (200, 200, 200)),
        "b": (pair, (200, 200)),
        "c": (three, (10, 10, 10)),
        "d": (pair, (10, 10)),
        "e": (three, (200, 100, 10)),
        "f": (pair, (200, 10)),
    }
    if id in layouts:
        idx, counts = layouts[id]
        return ScenarioSpec(id, _unimodal(idx, counts), seed)
    if id == "g":
        bimodal = (Component(MEANS[0], COVS[0], 200), Component(MEANS[1], COVS[1], 200))
        return ScenarioSpec(id, (bimodal, (Component(MEANS[2], COVS[2], 200),)), seed)
    raise UnknownScenario(f"unknown scenario {id!r}; choose one of {', '.join(SCENARIO_IDS)}")


def generate(spec: ScenarioSpec) -> LabeledDataset:
    """Draw every component in order from one PCG64 stream seeded by ``spec.seed``."""
    rng = make_rng(spec.seed)
    rows, labels = [], []
    for k, cls in enumerate(spec.classes):
        for comp in cls:
            rows.append(GaussianParams(comp.mean, comp.cov).sample(comp.count, rng))
            labels.append(np.full(comp.count, k))
    return LabeledDataset(np.vstack(rows), np.concatenate(labels), len(spec.classes))


def to_csv(ds: LabeledDataset) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([f"x{j + 1}" for j in range(ds.dim)] + ["label"])
    for x, y in zip(ds.X, ds.y):
        w.writerow([f"{v:.17g}" for v in x] + [int(y)])
    return buf.getvalue()


def write_csv(ds: LabeledDataset, path) -> None:
    Path(path).write_text(to_csv(ds))


def read_csv(path, n_classes: int | None = None) -> LabeledDataset:
    """Parse ``x1,...,xd,label`` rows; errors name the offending line."""
    text = Path(path).read_text()
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise DataError(f"{path}: empty file") from None
    if not header or header[-1].strip() != "label":
        raise DataError(f"{path}:1: header must end with a 'label' column")
    d = len(header) - 1
    X, y = [], []
    for lineno, row in enumerate(reader, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != d + 1:
            raise DataError(f"{path}:{lineno}: expected {d + 1} fields, got {len(row)}")
        try:
            X.append([float(v) for v in row[:d]])
            label = int(row[d])
        except ValueError as exc:
            raise DataError(f"{path}:{lineno}: {exc}") from None
        if label < 0:
            raise DataError(f"{path}:{lineno}: negative label {label}")
        y.append(label)
    if not X:
        raise DataError(f"{path}: no data rows")
    return LabeledDataset.from_arrays(np.array(X), np.array(y), n_classes)
