"""Shared test utilities: finite-difference gradient checking and brute-force
metric oracles, kept independent of the implementation paths they verify."""

from __future__ import annotations

import numpy as np

from adforge import engine as eg

FD_H = 1e-5
FD_REL_TOL = 1e-4
FD_ABS_FLOOR = 1e-6


def numeric_grad(build, param: eg.Value, idx, h: float = FD_H) -> float:
    """Central finite difference of build() w.r.t. one parameter coordinate."""
    flat = param.data.reshape(-1)
    orig = flat[idx]
    flat[idx] = orig + h
    f1 = build().item()
    flat[idx] = orig - h
    f2 = build().item()
    flat[idx] = orig
    return (f1 - f2) / (2.0 * h)


def gradcheck(build, params, rng=None, max_coords_per_param=None, h=FD_H):
    """Max relative FD error over (a sample of) all parameter coordinates."""
    out = build()
    eg.zero_grads(params)
    eg.backward(out)
    grads = [p.grad.copy() for p in params]
    worst = 0.0
    for p, g in zip(params, grads):
        size = p.data.size
        if max_coords_per_param is not None and size > max_coords_per_param:
            assert rng is not None
            coords = rng.choice(size, size=max_coords_per_param, replace=False)
        else:
            coords = range(size)
        gflat = g.reshape(-1)
        for i in coords:
            num = numeric_grad(build, p, i, h)
            denom = max(abs(num), abs(gflat[i]), FD_ABS_FLOOR)
            worst = max(worst, abs(num - gflat[i]) / denom)
    return worst


def auc_roc_pairs(scores, labels) -> float:
    """Brute-force pair counting: wins + half-ties over all pos/neg pairs."""
    scores = np.asarray(scores, dtype=np.float64).ravel()
    labels = np.asarray(labels).ravel()
    pos = scores[labels == 1]
    neg = scores[labels == 0]
    total = 0.0
    for sp in pos:
        for sn in neg:
            if sp > sn:
                total += 1.0
            elif sp == sn:
                total += 0.5
    return total / (len(pos) * len(neg))


def auc_pr_thresholds(scores, labels) -> float:
    """Average precision by explicit threshold enumeration."""
    scores = np.asarray(scores, dtype=np.float64).ravel()
    labels = np.asarray(labels).ravel()
    n_pos = int((labels == 1).sum())
    thresholds = np.unique(scores)[::-1]
    ap = 0.0
    recall_prev = 0.0
    for thr in thresholds:
        predicted = scores >= thr
        tp = int(((labels == 1) & predicted).sum())
        fp = int(((labels == 0) & predicted).sum())
        precision = tp / (tp + fp)
        recall = tp / n_pos
        ap += (recall - recall_prev) * precision
        recall_prev = recall
    return ap


def roc_trapezoid(scores, labels) -> float:
    """AUC by trapezoidal integration of the ROC curve (threshold sweep)."""
    scores = np.asarray(scores, dtype=np.float64).ravel()
    labels = np.asarray(labels).ravel()
    n_pos = int((labels == 1).sum())
    n_neg = int((labels == 0).sum())
    pts = [(0.0, 0.0)]
    for thr in np.unique(scores)[::-1]:
        predicted = scores >= thr
        tpr = ((labels == 1) & predicted).sum() / n_pos
        fpr = ((labels == 0) & predicted).sum() / n_neg
        pts.append((fpr, tpr))
    pts.append((1.0, 1.0))
    area = 0.0
    for (x0, y0), (x1, y1) in zip(pts[:-1], pts[1:]):
        area += (x1 - x0) * (y0 + y1) / 2.0
    return area


def make_separable_dataset(n_normal=150, n_anom=18, d=1, gap=10.0, seed=0):
    """Normals near 0, anomalies near `gap`: any reasonable pipeline separates."""
    from adforge.data import Dataset

    rng = np.random.default_rng(seed)
    X = np.vstack(
        [rng.normal(0.0, 0.1, size=(n_normal, d)), rng.normal(gap, 0.1, size=(n_anom, d))]
    )
    y = np.r_[np.zeros(n_normal, dtype=int), np.ones(n_anom, dtype=int)]
    return Dataset("separable", X, y)
