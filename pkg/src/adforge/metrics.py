"""Detection metrics, rank normalization, and the dataset x pipeline
performance matrix built from them."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

from .errors import ContractError, MetricError


def _check_two_classes(labels: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    labels = np.asarray(labels)
    pos = labels == 1
    neg = labels == 0
    if not pos.any() or not neg.any():
        raise MetricError("labels must contain both classes")
    return pos, neg


def auc_roc(scores, labels) -> float:
    """Probability that a random anomaly outscores a random normal (ties count 1/2)."""
    scores = np.asarray(scores, dtype=np.float64).ravel()
    pos, neg = _check_two_classes(labels)
    ranks = rankdata(scores)
    n_pos, n_neg = int(pos.sum()), int(neg.sum())
    u = ranks[pos].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


def auc_pr(scores, labels) -> float:
    """Average precision: sum of (R_k - R_{k-1}) * P_k over descending thresholds."""
    scores = np.asarray(scores, dtype=np.float64).ravel()
    pos, _ = _check_two_classes(labels)
    y = pos.astype(np.float64)
    order = np.argsort(-scores, kind="stable")
    s_sorted = scores[order]
    y_sorted = y[order]
    tp = np.cumsum(y_sorted)
    fp = np.cumsum(1.0 - y_sorted)
    # keep only the last entry of each tied-score group (one threshold per distinct score)
    distinct = np.r_[s_sorted[1:] != s_sorted[:-1], True]
    tp, fp = tp[distinct], fp[distinct]
    precision = tp / (tp + fp)
    recall = tp / y.sum()
    recall_prev = np.r_[0.0, recall[:-1]]
    return float(np.sum((recall - recall_prev) * precision))


def rank_normalize(raw_row, failure_mask=None) -> np.ndarray:
    """Per-row normalized ranks in (0, 1]: best raw value -> 1/m, failed cells -> 1.

    Ranks are averaged over ties and divided by the row length, so a row with
    no failures is a tie-averaged permutation of {1..m}/m.
    """
    raw_row = np.asarray(raw_row, dtype=np.float64)
    m = raw_row.shape[0]
    if failure_mask is None:
        failure_mask = np.zeros(m, dtype=bool)
    failure_mask = np.asarray(failure_mask, dtype=bool)
    valid = ~failure_mask
    if not valid.any():
        raise MetricError("rank_normalize needs at least one non-failed cell")
    out = np.ones(m, dtype=np.float64)
    out[valid] = rankdata(-raw_row[valid]) / m
    return out


def inverse_rank_metric(raw_row, failure_mask=None) -> np.ndarray:
    """1 - rank_normalize(row): higher = better, used for relative-rank reports."""
    return 1.0 - rank_normalize(raw_row, failure_mask)


@dataclass
class PerformanceMatrix:
    """Raw metric values (averaged over repeats) per dataset x pipeline."""

    dataset_ids: list[str]
    raw: np.ndarray  # (n, m)
    failed: np.ndarray  # (n, m) bool

    def __post_init__(self):
        self.raw = np.asarray(self.raw, dtype=np.float64)
        self.failed = np.asarray(self.failed, dtype=bool)
        if self.raw.shape != self.failed.shape:
            raise ContractError("raw and failed shapes differ")
        if len(self.dataset_ids) != self.raw.shape[0]:
            raise ContractError("dataset_ids length mismatch")

    def p_rank(self) -> np.ndarray:
        return np.stack(
            [rank_normalize(self.raw[i], self.failed[i]) for i in range(self.raw.shape[0])]
        )

    def row(self, dataset: str) -> int:
        return self.dataset_ids.index(dataset)
