"""Tabular data handling: CSV ingestion, one-time shuffling, prefix samples
and resampling splits.

The training pipeline shuffles a dataset exactly once (stratified by label
for classification) and then draws nested samples by taking the first ``s``
rows of the shuffled order. Resampling splits slice that same order, so a
growing sample extends the training rows while the holdout suffix identity
stays tied to the one shuffle.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = [
    "Dataset",
    "ShuffledView",
    "ResamplingPlan",
    "DataError",
    "load_csv",
    "shuffle",
    "prefix",
    "split",
]

TASKS = ("binary", "multiclass", "regression")


class DataError(ValueError):
    """Raised for unusable input data or invalid sampling requests."""


@dataclass(frozen=True)
class Dataset:
    """A rectangular numeric feature matrix with a label vector.

    Classification labels are dense class indices starting at 0.
    """

    features: np.ndarray
    labels: np.ndarray
    task: str

    def __post_init__(self) -> None:
        if self.task not in TASKS:
            raise DataError(f"unknown task {self.task!r}")
        if self.features.ndim != 2:
            raise DataError("features must be a 2-d matrix")
        if self.labels.shape[0] != self.features.shape[0]:
            raise DataError("labels length must equal the number of rows")
        if self.task != "regression":
            labs = self.labels
            if labs.size and (labs.min() < 0 or labs.max() >= self.n_classes):
                raise DataError("classification labels must be dense class indices")

    @property
    def n_instances(self) -> int:
        return int(self.features.shape[0])

    @property
    def n_features(self) -> int:
        return int(self.features.shape[1])

    @property
    def n_classes(self) -> int:
        if self.task == "regression":
            return 0
        return int(self.labels.max()) + 1 if self.labels.size else 0

    def take(self, indices: np.ndarray) -> "Dataset":
        return Dataset(self.features[indices], self.labels[indices], self.task)


@dataclass(frozen=True)
class ShuffledView:
    """A dataset plus one fixed permutation of its rows."""

    base: Dataset
    permutation: np.ndarray
    seed: int

    @property
    def n_instances(self) -> int:
        return self.base.n_instances


@dataclass(frozen=True)
class ResamplingPlan:
    """Either k-fold cross-validation or holdout with ratio rho."""

    kind: str
    k: int = 5
    rho: float = 0.1

    def __post_init__(self) -> None:
        if self.kind not in ("cv", "holdout"):
            raise DataError(f"unknown resampling kind {self.kind!r}")
        if self.kind == "cv" and self.k < 2:
            raise DataError("cv needs k >= 2")
        if self.kind == "holdout" and not (0.0 < self.rho < 1.0):
            raise DataError("holdout needs 0 < rho < 1")

    def describe(self) -> str:
        return f"cv{self.k}" if self.kind == "cv" else f"holdout{self.rho:g}"


def load_csv(path: str | Path, task: str, label_column: str | int | None = None) -> Dataset:
    """Load a header-first CSV with numeric features and one label column.

    ``label_column`` is a header name or a 0-based index; it defaults to the
    last column. Missing values and non-numeric feature cells are rejected
    with the offending row and column named.
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"file not found: {path}")
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        rows = list(reader)
    if not rows:
        raise DataError(f"{path}: no data rows")
    header = [h.strip() for h in header]
    if label_column is None:
        label_idx = len(header) - 1
    elif isinstance(label_column, int) or (isinstance(label_column, str) and label_column.lstrip("-").isdigit()):
        label_idx = int(label_column)
        if not (0 <= label_idx < len(header)):
            raise DataError(f"label column index {label_idx} out of range for {len(header)} columns")
    else:
        try:
            label_idx = header.index(label_column)
        except ValueError:
            raise DataError(f"label column {label_column!r} not found in header {header}") from None

    n_cols = len(header)
    feat_cols = [i for i in range(n_cols) if i != label_idx]
    features = np.empty((len(rows), len(feat_cols)), dtype=float)
    raw_labels = np.empty(len(rows), dtype=float)
    for r, row in enumerate(rows):
        if len(row) != n_cols:
            raise DataError(f"{path}: row {r + 2} has {len(row)} cells, expected {n_cols}")
        for out_c, c in enumerate(feat_cols):
            try:
                features[r, out_c] = float(row[c])
            except ValueError:
                raise DataError(
                    f"{path}: row {r + 2}, column {header[c]!r}: "
                    f"cannot parse {row[c]!r} as a number"
                ) from None
        try:
            raw_labels[r] = float(row[label_idx])
        except ValueError:
            raise DataError(
                f"{path}: row {r + 2}, column {header[label_idx]!r}: "
                f"cannot parse {row[label_idx]!r} as a number"
            ) from None

    if task == "regression":
        labels = raw_labels
    else:
        classes, labels = np.unique(raw_labels, return_inverse=True)
        labels = labels.astype(np.int64)
        if task == "binary" and len(classes) != 2:
            raise DataError(f"binary task needs exactly 2 classes, found {len(classes)}")
        if task == "multiclass" and len(classes) < 2:
            raise DataError("multiclass task needs at least 2 classes")
    return Dataset(features, labels, task)


def _stratified_order(labels: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Permutation whose every prefix keeps per-class counts within one of
    the proportional share.

    Each class's members are shuffled independently, then classes are
    interleaved by a sequential quota rule: the next slot goes to the class
    whose realized count lags its proportional share the most. The quota
    rule keeps every prefix count in {floor(s*p), ceil(s*p)}.
    """
    n = labels.shape[0]
    classes, counts = np.unique(labels, return_counts=True)
    per_class = [rng.permutation(np.flatnonzero(labels == c)) for c in classes]
    if len(classes) == 1:
        return per_class[0]
    if len(classes) == 2:
        # closed form: class-0 count after s slots is floor(s*p0 + 0.5)
        p0 = counts[0] / n
        s = np.arange(n + 1)
        c0 = np.floor(s * p0 + 0.5).astype(np.int64)
        take0 = np.diff(c0).astype(bool)
        order = np.empty(n, dtype=np.int64)
        order[take0] = per_class[0]
        order[~take0] = per_class[1]
        return order
    props = counts / n
    taken = np.zeros(len(classes), dtype=np.int64)
    cursors = np.zeros(len(classes), dtype=np.int64)
    order = np.empty(n, dtype=np.int64)
    for s in range(1, n + 1):
        deficit = s * props - taken
        deficit[cursors >= counts] = -np.inf  # class exhausted
        c = int(np.argmax(deficit))
        order[s - 1] = per_class[c][cursors[c]]
        cursors[c] += 1
        taken[c] += 1
    return order


def shuffle(data: Dataset, seed: int) -> ShuffledView:
    """Shuffle once; classification tasks get a stratified order."""
    rng = np.random.default_rng(seed)
    if data.task == "regression" or data.n_instances == 0:
        perm = rng.permutation(data.n_instances)
    else:
        perm = _stratified_order(data.labels, rng)
    return ShuffledView(base=data, permutation=perm.astype(np.int64), seed=int(seed))


def prefix(view: ShuffledView, s: int) -> Dataset:
    """Dataset of the first ``s`` rows of the shuffled order (nested in s)."""
    n = view.n_instances
    if not (1 <= s <= n):
        raise DataError(f"sample size {s} out of range [1, {n}]")
    return view.base.take(view.permutation[:s])


def _split_order(data: Dataset, seed: int | None) -> np.ndarray:
    if seed is None:
        # Caller guarantees the row order is already shuffled (the prefix
        # pipeline); slicing it keeps the validation suffix stable as s grows.
        return np.arange(data.n_instances, dtype=np.int64)
    rng = np.random.default_rng(seed)
    if data.task == "regression":
        return rng.permutation(data.n_instances).astype(np.int64)
    return _stratified_order(data.labels, rng)


def split(
    data: Dataset, plan: ResamplingPlan, seed: int | None = None
) -> list[tuple[Dataset, Dataset]]:
    """Materialize (train, validation) pairs for the given plan.

    With ``seed=None`` the existing row order is sliced directly; otherwise
    rows are re-ordered (stratified for classification) from the seed first.
    Holdout reserves the last ``ceil(rho * n)`` positions, which stays
    class-balanced because stratified orders interleave evenly. cv deals
    folds round-robin within each class (plain striping for regression).
    """
    n = data.n_instances
    order = _split_order(data, seed)
    if plan.kind == "holdout":
        if n < 2:
            raise DataError("holdout needs at least 2 rows")
        n_val = int(np.ceil(plan.rho * n))
        n_val = min(max(n_val, 1), n - 1)
        train_idx, val_idx = order[: n - n_val], order[n - n_val :]
        return [(data.take(train_idx), data.take(val_idx))]
    if n < plan.k:
        raise DataError(f"cv with k={plan.k} needs at least {plan.k} rows, got {n}")
    fold_of = np.empty(n, dtype=np.int64)
    if data.task == "regression":
        fold_of[:] = np.arange(n) % plan.k
    else:
        labels_in_order = data.labels[order]
        for c in np.unique(labels_in_order):
            members = np.flatnonzero(labels_in_order == c)
            fold_of[members] = np.arange(len(members)) % plan.k
    pairs = []
    for i in range(plan.k):
        val_mask = fold_of == i
        pairs.append((data.take(order[~val_mask]), data.take(order[val_mask])))
    return pairs
