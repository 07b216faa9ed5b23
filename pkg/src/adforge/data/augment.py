"""Anomaly oversampling: duplicate, SMOTE-interpolate or mixup labeled anomalies
until the labeled pool is roughly as large as the unlabeled one."""

from __future__ import annotations

from dataclasses import replace

import numpy as np

from ..errors import ConfigurationError, InsufficientNeighbors
from ..seeds import rng_for
from .dataset import WeakView

KINDS = ("origin", "oversampling", "smote", "mixup")
SMOTE_NEIGHBORS = 5
MIXUP_ALPHA = 0.2


def augment(view: WeakView, kind: str, seed: int) -> WeakView:
    """Return a view whose labeled-anomaly pool is grown to the unlabeled size."""
    if kind not in KINDS:
        raise ConfigurationError(f"unknown augmentation kind {kind!r}")
    if kind == "origin":
        return view
    anchors = view.parent.X[view.train_labeled_anomaly_idx]
    n_target = len(view.train_unlabeled_idx) - len(anchors)
    if n_target <= 0:
        return view
    rng = rng_for(seed, view.parent.name, "augment", kind)
    if kind == "oversampling":
        picks = rng.integers(0, len(anchors), size=n_target)
        extra = anchors[picks]
    elif kind == "smote":
        extra = _smote(anchors, n_target, rng)
    else:
        lam = rng.beta(MIXUP_ALPHA, MIXUP_ALPHA, size=(n_target, 1))
        i = rng.integers(0, len(anchors), size=n_target)
        j = rng.integers(0, len(anchors), size=n_target)
        extra = lam * anchors[i] + (1.0 - lam) * anchors[j]
    return replace(view, aug_X=extra)


def _smote(anchors: np.ndarray, n_target: int, rng: np.random.Generator) -> np.ndarray:
    if len(anchors) <= SMOTE_NEIGHBORS:
        raise InsufficientNeighbors(
            f"smote needs more labeled anomalies than its {SMOTE_NEIGHBORS} neighbors, "
            f"got {len(anchors)}"
        )
    d2 = np.sum((anchors[:, None, :] - anchors[None, :, :]) ** 2, axis=2)
    np.fill_diagonal(d2, np.inf)
    nn = np.argsort(d2, axis=1)[:, :SMOTE_NEIGHBORS]
    base = rng.integers(0, len(anchors), size=n_target)
    pick = rng.integers(0, SMOTE_NEIGHBORS, size=n_target)
    nb = nn[base, pick]
    u = rng.random((n_target, 1))
    return anchors[base] + u * (anchors[nb] - anchors[base])
