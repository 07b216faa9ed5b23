"""Dataset container, CSV ingestion and the weakly-supervised split."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import ConfigurationError, DatasetError
from ..seeds import rng_for

TRAIN_FRACTION = 0.7
LABEL_COLUMN = "label"


@dataclass
class Dataset:
    """Feature matrix plus binary labels (1 = anomaly)."""

    name: str
    X: np.ndarray
    y: np.ndarray
    provenance: str = "loaded"

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=np.float64)
        self.y = np.asarray(self.y, dtype=np.int64)
        self.validate()

    def validate(self) -> None:
        if self.X.ndim != 2:
            raise DatasetError(f"{self.name}: X must be 2-D")
        if self.X.shape[0] != self.y.shape[0]:
            raise DatasetError(f"{self.name}: X and y row counts differ")
        if not np.all(np.isfinite(self.X)):
            bad = np.argwhere(~np.isfinite(self.X))[0]
            raise DatasetError(f"{self.name}: non-finite value at row {bad[0]}, column {bad[1]}")
        if not np.isin(self.y, (0, 1)).all():
            raise DatasetError(f"{self.name}: labels must be 0/1")
        if int(self.y.sum()) < 2:
            raise DatasetError(f"{self.name}: fewer than 2 anomalies")
        if int((self.y == 0).sum()) < 2:
            raise DatasetError(f"{self.name}: fewer than 2 normals")

    @property
    def n_samples(self) -> int:
        return self.X.shape[0]

    @property
    def n_features(self) -> int:
        return self.X.shape[1]

    @property
    def n_anomalies(self) -> int:
        return int(self.y.sum())


def load_dataset(path: str | Path, name: str | None = None) -> Dataset:
    """Load a CSV with a header, numeric feature columns and a final 0/1 'label' column."""
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DatasetError(f"{path}: empty file") from None
        if not header or header[-1].strip() != LABEL_COLUMN:
            raise DatasetError(f"{path}: final column must be named '{LABEL_COLUMN}'")
        n_cols = len(header)
        rows: list[list[float]] = []
        for i, row in enumerate(reader):
            if not row:
                continue
            if len(row) != n_cols:
                raise DatasetError(f"{path}: row {i} has {len(row)} cells, expected {n_cols}")
            parsed = []
            for j, cell in enumerate(row):
                try:
                    v = float(cell)
                except ValueError:
                    raise DatasetError(
                        f"{path}: non-numeric cell at row {i}, column '{header[j]}'"
                    ) from None
                if not np.isfinite(v):
                    raise DatasetError(f"{path}: NaN/inf at row {i}, column '{header[j]}'")
                parsed.append(v)
            rows.append(parsed)
    if not rows:
        raise DatasetError(f"{path}: no data rows")
    arr = np.asarray(rows, dtype=np.float64)
    X, y_raw = arr[:, :-1], arr[:, -1]
    if not np.isin(y_raw, (0.0, 1.0)).all():
        raise DatasetError(f"{path}: label column must contain only 0/1")
    return Dataset(name or path.stem, X, y_raw.astype(np.int64))


def save_dataset(ds: Dataset, path: str | Path) -> None:
    """Write a dataset back to the CSV format accepted by load_dataset."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = [f"f{j}" for j in range(ds.n_features)] + [LABEL_COLUMN]
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for i in range(ds.n_samples):
            writer.writerow([repr(v) for v in ds.X[i]] + [int(ds.y[i])])


@dataclass
class WeakView:
    """Weakly-supervised partition: unlabeled pool, n_a revealed anomalies, held-out test.

    ``aug_X`` holds synthesized anomaly rows appended by augmentation; they are
    not part of the parent dataset and always carry label 1.
    """

    parent: Dataset
    train_unlabeled_idx: np.ndarray
    train_labeled_anomaly_idx: np.ndarray
    test_idx: np.ndarray
    n_a: int
    seed: int
    aug_X: np.ndarray | None = field(default=None)

    @property
    def unlabeled_X(self) -> np.ndarray:
        return self.parent.X[self.train_unlabeled_idx]

    @property
    def labeled_X(self) -> np.ndarray:
        base = self.parent.X[self.train_labeled_anomaly_idx]
        if self.aug_X is None or len(self.aug_X) == 0:
            return base
        return np.vstack([base, self.aug_X])

    @property
    def n_labeled(self) -> int:
        extra = 0 if self.aug_X is None else len(self.aug_X)
        return len(self.train_labeled_anomaly_idx) + extra

    @property
    def train_size(self) -> int:
        return len(self.train_unlabeled_idx) + self.n_labeled

    @property
    def test_X(self) -> np.ndarray:
        return self.parent.X[self.test_idx]

    @property
    def test_y(self) -> np.ndarray:
        return self.parent.y[self.test_idx]

    def train_matrix(self) -> tuple[np.ndarray, np.ndarray]:
        """All train rows (unlabeled first, then labeled) with 0/1 training labels."""
        X = np.vstack([self.unlabeled_X, self.labeled_X])
        y = np.r_[np.zeros(len(self.train_unlabeled_idx)), np.ones(self.n_labeled)]
        return X, y


def make_weak_view(ds: Dataset, n_a: int, seed: int) -> WeakView:
    """Stratified 70/30 train/test split with n_a anomalies revealed as labeled."""
    if n_a < 1:
        raise ConfigurationError("n_a must be >= 1")
    rng = rng_for(seed, ds.name, "weak_view")
    anom = np.flatnonzero(ds.y == 1)
    norm = np.flatnonzero(ds.y == 0)
    anom = anom[rng.permutation(len(anom))]
    norm = norm[rng.permutation(len(norm))]
    n_train_anom = int(round(TRAIN_FRACTION * len(anom)))
    n_train_norm = int(round(TRAIN_FRACTION * len(norm)))
    # keep both splits usable: test needs at least one sample of each class
    n_train_anom = min(max(n_train_anom, 1), len(anom) - 1)
    n_train_norm = min(max(n_train_norm, 1), len(norm) - 1)
    train_anom, test_anom = anom[:n_train_anom], anom[n_train_anom:]
    train_norm, test_norm = norm[:n_train_norm], norm[n_train_norm:]
    if n_a > len(train_anom):
        raise ConfigurationError(
            f"{ds.name}: n_a={n_a} exceeds the {len(train_anom)} anomalies in the train split"
        )
    labeled = np.sort(train_anom[:n_a])
    unlabeled = np.sort(np.r_[train_anom[n_a:], train_norm])
    test = np.sort(np.r_[test_anom, test_norm])
    return WeakView(
        parent=ds,
        train_unlabeled_idx=unlabeled,
        train_labeled_anomaly_idx=labeled,
        test_idx=test,
        n_a=n_a,
        seed=seed,
    )
