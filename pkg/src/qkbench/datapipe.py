"""Dataset ingestion, preprocessing, splits, and synthetic generators.

Every fitted statistic (median, min/max, mean/var, PCA basis) is a function
of the training partition only; test data is transformed with the fitted
values. All stochastic operations are pure functions of (inputs, seed).
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError, DataError

MISSING_TOKENS = {"", "na", "nan", "null", "?"}


@dataclass
class Dataset:
    X: np.ndarray
    y: np.ndarray
    feature_names: list[str] | None = None
    provenance: str = ""

    def __post_init__(self) -> None:
        self.X = np.asarray(self.X, dtype=np.float64)
        self.y = np.asarray(self.y)
        if self.X.ndim != 2 or len(self.X) != len(self.y):
            raise DataError(
                f"sample matrix {self.X.shape} inconsistent with {len(self.y)} labels"
            )

    @property
    def m(self) -> int:
        return self.X.shape[0]

    @property
    def d(self) -> int:
        return self.X.shape[1]

    def subset(self, idx: np.ndarray) -> "Dataset":
        return Dataset(self.X[idx], self.y[idx], self.feature_names, self.provenance)


@dataclass
class PipelineSpec:
    """Preprocessing ledger: imputation, scaling, PCA, split sizing."""

    impute: str = "none"
    scaler: str = "minmax"
    pca_components: int | float | None = None
    train_fraction: float = 0.75
    train_cap: int | None = None
    test_cap: int | None = None
    stratify: bool = True
    seed: int = 42

    def __post_init__(self) -> None:
        if self.impute not in ("none", "median"):
            raise ConfigError(f"pipeline.impute: unknown value {self.impute!r}")
        if self.scaler not in ("minmax", "standard"):
            raise ConfigError(f"pipeline.scaler: unknown value {self.scaler!r}")
        if not 0.0 < self.train_fraction < 1.0:
            raise ConfigError("pipeline.train_fraction must lie in (0, 1)")
        for name in ("train_cap", "test_cap"):
            cap = getattr(self, name)
            if cap is not None and cap < 1:
                raise ConfigError(f"pipeline.{name} must be >= 1")


def load_csv(path: str | Path, label_column: str, delimiter: str = ",") -> Dataset:
    """Parse a header-row CSV; empty/NA cells become NaN for later imputation."""
    path = Path(path)
    with path.open(newline="") as fh:
        rows = list(csv.reader(fh, delimiter=delimiter))
    if not rows:
        raise DataError(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    if label_column not in header:
        raise DataError(f"{path}: label column {label_column!r} not in header {header}")
    label_idx = header.index(label_column)
    feature_names = [h for k, h in enumerate(header) if k != label_idx]
    X, labels = [], []
    for r, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise DataError(f"{path}:{r}: expected {len(header)} cells, got {len(row)}")
        feats = []
        for k, cell in enumerate(row):
            if k == label_idx:
                continue
            cell = cell.strip()
            if cell.lower() in MISSING_TOKENS:
                feats.append(np.nan)
                continue
            try:
                feats.append(float(cell))
            except ValueError:
                raise DataError(
                    f"{path}:{r}: unparseable cell {cell!r} in column {header[k]!r}"
                ) from None
        label = row[label_idx].strip()
        if label.lower() in MISSING_TOKENS:
            raise DataError(f"{path}:{r}: missing label")
        labels.append(label)
        X.append(feats)
    return Dataset(np.array(X, dtype=np.float64), _parse_labels(labels), feature_names, str(path))


def _parse_labels(labels: list[str]) -> np.ndarray:
    try:
        return np.array([int(v) for v in labels])
    except ValueError:
        pass
    try:
        return np.array([float(v) for v in labels])
    except ValueError:
        return np.array(labels)


def impute_median(X_train: np.ndarray, X_test: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Fill missing entries with per-feature medians fitted on train only."""
    X_train = np.array(X_train, dtype=np.float64)
    X_test = np.array(X_test, dtype=np.float64)
    if np.all(np.isnan(X_train), axis=0).any():
        raise DataError("a feature is entirely missing in the training split")
    medians = np.nanmedian(X_train, axis=0)
    for X in (X_train, X_test):
        holes = np.isnan(X)
        X[holes] = np.broadcast_to(medians, X.shape)[holes]
    return X_train, X_test


def scale_minmax(X_train: np.ndarray, X_test: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Map each feature to [0, 1] on train; constant features go to 0."""
    X_train = np.asarray(X_train, dtype=np.float64)
    X_test = np.asarray(X_test, dtype=np.float64)
    lo = X_train.min(axis=0)
    span = X_train.max(axis=0) - lo
    safe = np.where(span > 0, span, 1.0)
    out_tr = np.where(span > 0, (X_train - lo) / safe, 0.0)
    out_te = np.where(span > 0, (X_test - lo) / safe, 0.0)
    return out_tr, out_te


def scale_standard(X_train: np.ndarray, X_test: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Zero mean, unit population variance per feature (fitted on train)."""
    X_train = np.asarray(X_train, dtype=np.float64)
    X_test = np.asarray(X_test, dtype=np.float64)
    mean = X_train.mean(axis=0)
    std = X_train.std(axis=0)
    safe = np.where(std > 0, std, 1.0)
    out_tr = np.where(std > 0, (X_train - mean) / safe, 0.0)
    out_te = np.where(std > 0, (X_test - mean) / safe, 0.0)
    return out_tr, out_te


def pca_fit_transform(
    X_train: np.ndarray,
    X_test: np.ndarray,
    n_components: int | float | None,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Project both sets on the top train-PCA components.

    n_components: an int picks k directly; a float in (0, 1) picks the
    smallest k whose cumulative explained-variance ratio reaches it; None
    keeps the full rank. Returns (train, test, cumulative ratio curve over
    the full rank). Component signs follow the largest-magnitude loading.
    """
    X_train = np.asarray(X_train, dtype=np.float64)
    X_test = np.asarray(X_test, dtype=np.float64)
    m, d = X_train.shape
    max_rank = min(m - 1, d)
    mean = X_train.mean(axis=0)
    Xc = X_train - mean
    if d <= 512:
        cov = (Xc.T @ Xc) / (m - 1)
        eigvals, vecs = np.linalg.eigh(cov)
        order = np.argsort(eigvals)[::-1]
        eigvals = eigvals[order][:max_rank]
        components = vecs[:, order].T[:max_rank]
    else:
        _, svals, vt = np.linalg.svd(Xc, full_matrices=False)
        eigvals = (svals**2 / (m - 1))[:max_rank]
        components = vt[:max_rank]
    lead = np.argmax(np.abs(components), axis=1)
    flip = components[np.arange(len(components)), lead] < 0
    components[flip] *= -1.0
    total = float((Xc * Xc).sum()) / (m - 1)
    ratios = np.maximum(eigvals, 0.0) / total if total > 0 else np.zeros_like(eigvals)
    cum = np.cumsum(ratios)
    if n_components is None:
        k = max_rank
    elif isinstance(n_components, float) and 0 < n_components < 1:
        reached = np.flatnonzero(cum >= n_components)
        k = int(reached[0]) + 1 if reached.size else max_rank
    else:
        k = int(n_components)
        if not 1 <= k <= max_rank:
            raise ConfigError(f"pca_components={k} exceeds the usable rank {max_rank}")
    basis = components[:k]
    return Xc @ basis.T, (X_test - mean) @ basis.T, cum


def stratified_indices(
    y: np.ndarray, train_fraction: float, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Per-class shuffled split preserving proportions within one sample."""
    train_idx, test_idx = [], []
    for cls in np.unique(y):
        idx = np.flatnonzero(y == cls)
        if idx.size < 2:
            raise DataError(f"class {cls!r} has fewer than 2 members; cannot stratify")
        perm = rng.permutation(idx)
        n_tr = int(round(train_fraction * idx.size))
        n_tr = min(max(n_tr, 1), idx.size - 1)
        train_idx.extend(perm[:n_tr])
        test_idx.extend(perm[n_tr:])
    return np.sort(np.array(train_idx)), np.sort(np.array(test_idx))


def stratified_split(
    ds: Dataset, train_fraction: float = 0.75, seed: int = 42
) -> tuple[Dataset, Dataset]:
    """Seeded stratified train/test split of a dataset."""
    rng = np.random.default_rng(seed)
    tr, te = stratified_indices(ds.y, train_fraction, rng)
    return ds.subset(tr), ds.subset(te)


def stratified_sample(ds: Dataset, cap: int, seed: int = 42) -> Dataset:
    """Subsample to at most cap rows, preserving class proportions."""
    if cap < 1:
        raise ConfigError("sample cap must be >= 1")
    if cap >= ds.m:
        return ds
    rng = np.random.default_rng(seed)
    classes, counts = np.unique(ds.y, return_counts=True)
    quotas = cap * counts / ds.m
    alloc = np.floor(quotas).astype(int)
    if cap >= len(classes):
        alloc = np.maximum(alloc, 1)
    # distribute the remainder by largest fractional part, class order on ties
    while alloc.sum() > cap:
        alloc[np.argmax(alloc)] -= 1
    frac_order = np.argsort(-(quotas - np.floor(quotas)), kind="stable")
    for k in frac_order:
        if alloc.sum() >= cap:
            break
        if alloc[k] < counts[k]:
            alloc[k] += 1
    picked = []
    for cls, take in zip(classes, alloc):
        idx = np.flatnonzero(ds.y == cls)
        picked.extend(rng.choice(idx, size=take, replace=False))
    return ds.subset(np.sort(np.array(picked)))


def apply_pipeline(
    X_train: np.ndarray, X_test: np.ndarray, spec: PipelineSpec
) -> tuple[np.ndarray, np.ndarray, dict]:
    """Impute -> scale -> optional PCA, all fitted on the training partition."""
    info: dict = {}
    if spec.impute == "median":
        X_train, X_test = impute_median(X_train, X_test)
    for name, X in (("train", X_train), ("test", X_test)):
        if np.isnan(np.asarray(X, dtype=np.float64)).any():
            raise DataError(f"missing values remain in the {name} matrix; enable imputation")
    scaler = scale_minmax if spec.scaler == "minmax" else scale_standard
    X_train, X_test = scaler(X_train, X_test)
    if spec.pca_components is not None:
        X_train, X_test, cum = pca_fit_transform(X_train, X_test, spec.pca_components)
        info["pca_cumulative_variance"] = cum.tolist()
        info["pca_components"] = X_train.shape[1]
    for name, X in (("train", X_train), ("test", X_test)):
        if not np.all(np.isfinite(X)):
            raise DataError(f"non-finite values remain in the {name} matrix after preprocessing")
    return X_train, X_test, info


def learning_curve(
    ds: Dataset,
    sizes: list[int],
    seed: int = 42,
    C_grid: tuple = (0.1, 1.0, 10.0, 100.0),
    gamma_grid: tuple = ("scale",),
) -> list[tuple[int, float]]:
    """Test accuracy of a grid-searched RBF-SVC proxy at growing train sizes."""
    from . import search, svm
    from .kernels import gram_rbf, resolve_gamma

    train, test = stratified_split(ds, 0.75, seed)
    points = []
    for size in sizes:
        if size > train.m:
            raise DataError(f"learning-curve size {size} exceeds the train split {train.m}")
        sub = stratified_sample(train, size, seed)
        result = search.grid_search_classical(
            "rbf", sub.X, sub.y, C_grid, gamma_grid, seed=seed
        )
        gamma = resolve_gamma(result.best_params["gamma"], sub.X)
        K_tr = gram_rbf(sub.X, gamma=gamma)
        K_te = gram_rbf(test.X, sub.X, gamma=gamma)
        pred = svm.fit_predict_multiclass(K_tr.values, sub.y, result.best_params["C"], K_te.values)
        points.append((size, svm.accuracy(pred, test.y)))
    return points


def make_synthetic(
    kind: str, m: int, noise: float = 0.0, seed: int = 0, n_classes: int = 2
) -> Dataset:
    """Seeded toy datasets: two_moons, blobs, or xor_rings."""
    if m < 4:
        raise ConfigError("synthetic datasets need m >= 4")
    rng = np.random.default_rng(seed)
    if kind == "two_moons":
        n_out = m // 2
        n_in = m - n_out
        t_out = np.linspace(0, np.pi, n_out)
        t_in = np.linspace(0, np.pi, n_in)
        X = np.vstack(
            [
                np.column_stack([np.cos(t_out), np.sin(t_out)]),
                np.column_stack([1.0 - np.cos(t_in), 0.5 - np.sin(t_in)]),
            ]
        )
        y = np.concatenate([np.zeros(n_out, dtype=int), np.ones(n_in, dtype=int)])
        X = X + rng.normal(scale=noise, size=X.shape) if noise > 0 else X
    elif kind == "blobs":
        angles = 2 * np.pi * np.arange(n_classes) / n_classes
        centers = 3.0 * np.column_stack([np.cos(angles), np.sin(angles)])
        counts = [m // n_classes + (1 if k < m % n_classes else 0) for k in range(n_classes)]
        X = np.vstack(
            [centers[k] + noise * rng.normal(size=(counts[k], 2)) for k in range(n_classes)]
        )
        y = np.concatenate([np.full(counts[k], k) for k in range(n_classes)])
    elif kind == "xor_rings":
        radii = np.where(np.arange(m) % 2 == 0, 0.5, 1.0)
        theta = rng.uniform(0, 2 * np.pi, m)
        r = radii + noise * rng.normal(size=m)
        X = np.column_stack([r * np.cos(theta), r * np.sin(theta)])
        quadrant_parity = (np.cos(theta) * np.sin(theta) > 0).astype(int)
        y = (radii > 0.75).astype(int) ^ quadrant_parity
    else:
        raise ConfigError(f"unknown synthetic kind {kind!r}")
    return Dataset(X, y, provenance=f"synthetic:{kind}(m={m},noise={noise},seed={seed})")


def save_dataset(ds: Dataset, base_path: str | Path) -> tuple[Path, Path]:
    """Cache as <base>.npz (matrix) plus <base>.manifest.json (labels, names)."""
    base = Path(base_path)
    npz = base.with_suffix(".npz")
    manifest = base.with_suffix(".manifest.json")
    np.savez(npz, X=ds.X)
    payload = {
        "y": [v.item() if hasattr(v, "item") else v for v in ds.y],
        "feature_names": ds.feature_names,
        "provenance": ds.provenance,
    }
    manifest.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return npz, manifest


def load_dataset(base_path: str | Path) -> Dataset:
    base = Path(base_path)
    X = np.load(base.with_suffix(".npz"))["X"]
    payload = json.loads(base.with_suffix(".manifest.json").read_text())
    return Dataset(X, np.array(payload["y"]), payload["feature_names"], payload["provenance"])
