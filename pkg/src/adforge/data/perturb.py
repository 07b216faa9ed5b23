"""Real-world robustness perturbations: duplicated anomalies, irrelevant
features, and train-only label noise."""

from __future__ import annotations

import math
from dataclasses import replace

import numpy as np

from ..errors import ConfigurationError, ContractError
from ..seeds import rng_for
from .dataset import Dataset, WeakView

KINDS = ("duplicate_anomalies", "irrelevant_features", "label_flip")
DUPLICATION_FACTOR = 3  # each anomaly is appended this many extra times
IRRELEVANT_FRACTION = 0.3
FLIP_FRACTION = 0.1


def perturb(ds: Dataset, kind: str, seed: int) -> Dataset:
    """Dataset-level perturbations; label_flip needs a WeakView (see flip_train_labels)."""
    if kind not in KINDS:
        raise ConfigurationError(f"unknown perturbation kind {kind!r}")
    if kind == "label_flip":
        raise ContractError(
            "label_flip acts on a WeakView's train portion; use flip_train_labels"
        )
    rng = rng_for(seed, ds.name, "perturb", kind)
    if kind == "duplicate_anomalies":
        anomalies = ds.X[ds.y == 1]
        X = np.vstack([ds.X] + [anomalies] * DUPLICATION_FACTOR)
        y = np.r_[ds.y, np.ones(len(anomalies) * DUPLICATION_FACTOR, dtype=np.int64)]
    else:
        n_extra = math.ceil(IRRELEVANT_FRACTION * ds.n_features)
        noise = rng.uniform(0.0, 1.0, size=(ds.n_samples, n_extra))
        X = np.hstack([ds.X, noise])
        y = ds.y.copy()
    return Dataset(ds.name, X, y, provenance=f"perturbed({kind},{ds.provenance})")


def flip_train_labels(view: WeakView, seed: int) -> tuple[Dataset, WeakView]:
    """Invert FLIP_FRACTION of the train labels; the test split is untouched.

    Returns the noisy dataset and a matching view. The labeled-anomaly index
    set is kept as-is, so rows flipped to 0 remain (wrongly) annotated as
    anomalies, which is precisely the annotation-error scenario.
    """
    ds = view.parent
    rng = rng_for(seed, ds.name, "perturb", "label_flip")
    train_idx = np.r_[view.train_unlabeled_idx, view.train_labeled_anomaly_idx]
    n_flip = int(FLIP_FRACTION * len(train_idx))
    flip = rng.choice(train_idx, size=n_flip, replace=False)
    y = ds.y.copy()
    y[flip] = 1 - y[flip]
    noisy = Dataset.__new__(Dataset)
    noisy.name = ds.name
    noisy.X = ds.X.copy()
    noisy.y = y
    noisy.provenance = f"perturbed(label_flip,{ds.provenance})"
    return noisy, replace(view, parent=noisy)
