"""Rasterised decision regions of a planar classifier.

Cell ``(r, c)`` is evaluated at its centre ``x = xmin + (c + 1/2) h``,
``y = ymax - (r + 1/2) h``, so row 0 is the top of the image.

PPM palette (class index -> RGB), cycled for more than ten classes:
0 (230, 25, 75), 1 (60, 180, 75), 2 (0, 130, 200), 3 (245, 130, 48),
4 (145, 30, 180), 5 (70, 240, 240), 6 (240, 50, 230), 7 (210, 245, 60),
8 (250, 190, 212), 9 (0, 128, 128).
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .discriminant import FittedClassifier, predict
from .errors import DataError, NonPlanarModel
from .estimation import LabeledDataset, estimate_cov, pooled_cov

PALETTE = np.array(
    [
        (230, 25, 75),
        (60, 180, 75),
        (0, 130, 200),
        (245, 130, 48),
        (145, 30, 180),
        (70, 240, 240),
        (240, 50, 230),
        (210, 245, 60),
        (250, 190, 212),
        (0, 128, 128),
    ],
    dtype=np.uint8,
)

Bounds = tuple[float, float, float, float]


@dataclass(frozen=True)
class DecisionGrid:
    bounds: Bounds
    h: float
    labels: np.ndarray  # (rows, cols) int

    @property
    def shape(self) -> tuple[int, int]:
        return self.labels.shape

    def counts(self, n_classes: int | None = None) -> np.ndarray:
        n = n_classes if n_classes is not None else int(self.labels.max()) + 1
        return np.bincount(self.labels.ravel(), minlength=n)

    def centres(self) -> tuple[np.ndarray, np.ndarray]:
        xmin, _, _, ymax = self.bounds
        rows, cols = self.shape
        xs = xmin + (np.arange(cols) + 0.5) * self.h
        ys = ymax - (np.arange(rows) + 0.5) * self.h
        return xs, ys


def lattice_shape(bounds: Bounds, h: float) -> tuple[int, int]:
    xmin, xmax, ymin, ymax = bounds
    if not (xmax > xmin and ymax > ymin and h > 0):
        raise ValueError(f"invalid grid bounds {bounds} or resolution {h}")
    # guard against ceil(3.0000000000000004)
    cols = math.ceil((xmax - xmin) / h - 1e-9)
    rows = math.ceil((ymax - ymin) / h - 1e-9)
    return rows, cols


def compute_grid(clf: FittedClassifier, bounds: Bounds, h: float = 0.1, workers: int = 1) -> DecisionGrid:
    """Predict every lattice cell; ``workers > 1`` splits the rows into blocks."""
    if clf.dim != 2:
        raise NonPlanarModel(f"decision grids need a 2-D model, got dimension {clf.dim}")
    rows, cols = lattice_shape(bounds, h)
    xmin, _, _, ymax = bounds
    xs = xmin + (np.arange(cols) + 0.5) * h
    ys = ymax - (np.arange(rows) + 0.5) * h

    def block(r0: int, r1: int) -> np.ndarray:
        gx, gy = np.meshgrid(xs, ys[r0:r1])
        pts = np.column_stack([gx.ravel(), gy.ravel()])
        return np.asarray(predict(clf, pts)).reshape(r1 - r0, cols)

    step = max(1, 20000 // cols)
    spans = [(r, min(r + step, rows)) for r in range(0, rows, step)]
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(lambda s: block(*s), spans))
    else:
        parts = [block(*s) for s in spans]
    labels = np.vstack(parts).astype(np.int64)
    return DecisionGrid(tuple(float(b) for b in bounds), float(h), labels)


def default_bounds(ds: LabeledDataset, pad_sd: float = 2.0) -> Bounds:
    """Bounding box of the data padded by ``pad_sd`` pooled standard deviations."""
    counts = ds.class_counts
    usable = [k for k in range(ds.n_classes) if counts[k] >= 2]
    if usable:
        pooled = pooled_cov((counts[k], estimate_cov(ds, k)) for k in usable)
        sd = np.sqrt(np.diag(pooled))
    else:
        sd = np.zeros(ds.dim)
    lo = ds.X.min(axis=0) - pad_sd * sd
    hi = ds.X.max(axis=0) + pad_sd * sd
    return (float(lo[0]), float(hi[0]), float(lo[1]), float(hi[1]))


def agreement(a: DecisionGrid, b: DecisionGrid) -> float:
    """Percentage of cells with equal labels."""
    if a.shape != b.shape:
        raise ValueError("grids have different shapes")
    return 100.0 * float(np.mean(a.labels == b.labels))


def to_ppm(grid: DecisionGrid) -> bytes:
    rows, cols = grid.shape
    rgb = PALETTE[grid.labels % len(PALETTE)]
    return f"P6\n{cols} {rows}\n255\n".encode("ascii") + rgb.tobytes()


def write_ppm(grid: DecisionGrid, path) -> None:
    Path(path).write_bytes(to_ppm(grid))


def to_csv(grid: DecisionGrid) -> str:
    """Bounds header line, one values line, then one line of labels per grid row."""
    xmin, xmax, ymin, ymax = grid.bounds
    head = "xmin,xmax,ymin,ymax,h\n" + ",".join(repr(v) for v in (xmin, xmax, ymin, ymax, grid.h))
    body = "\n".join(",".join(str(int(v)) for v in row) for row in grid.labels)
    return head + "\n" + body + "\n"


def write_csv(grid: DecisionGrid, path) -> None:
    Path(path).write_text(to_csv(grid))


def read_csv(path) -> DecisionGrid:
    lines = Path(path).read_text().splitlines()
    if len(lines) < 3 or lines[0].strip() != "xmin,xmax,ymin,ymax,h":
        raise DataError(f"{path}: not a decision-grid CSV")
    try:
        xmin, xmax, ymin, ymax, h = (float(v) for v in lines[1].split(","))
        labels = np.array([[int(v) for v in ln.split(",")] for ln in lines[2:] if ln], dtype=np.int64)
    except ValueError as exc:
        raise DataError(f"{path}: {exc}") from None
    grid = DecisionGrid((xmin, xmax, ymin, ymax), h, labels)
    if labels.shape != lattice_shape(grid.bounds, h):
        raise DataError(f"{path}: label block {labels.shape} does not match bounds")
    return grid
