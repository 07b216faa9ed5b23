"""Zero-shot pipeline selection, score ensembling, the RS/SS/GT baselines and
design-space refinement."""

from __future__ import annotations

import numpy as np

from ..data.dataset import WeakView
from ..errors import AdforgeError, ConfigurationError, ContractError
from ..metrics import auc_roc
from ..seeds import derive_seed, rng_for
from ..space import DIMENSION_ORDER, DesignSpace
from ..training import TrainedDetector, score_samples, train_pipeline

SS_MAX_CANDIDATES = 50
SS_TRAIN_FRACTION = 0.8


def select_pipelines(ranks: np.ndarray, k: int) -> list[int]:
    """Ids of the k smallest predicted ranks; ties break toward the lower id."""
    ranks = np.asarray(ranks, dtype=np.float64)
    m = len(ranks)
    if not 1 <= k <= m:
        raise ContractError(f"k={k} outside [1, {m}]")
    order = np.argsort(ranks, kind="stable")
    return [int(i) for i in order[:k]]


def _minmax(scores: np.ndarray) -> np.ndarray:
    lo, hi = scores.min(), scores.max()
    if hi == lo:
        return np.zeros_like(scores)
    return (scores - lo) / (hi - lo)


def ensemble_scores(detectors: list[TrainedDetector], X_test: np.ndarray) -> np.ndarray:
    """Average of per-detector min-max-normalized scores; failing detectors are
    dropped, at least one must survive."""
    if len(detectors) < 1:
        raise ContractError("ensemble needs at least one detector")
    parts = []
    for det in detectors:
        try:
            parts.append(_minmax(score_samples(det, X_test)))
        except AdforgeError:
            continue
    if not parts:
        raise ContractError("all ensemble detectors failed to score")
    return np.mean(parts, axis=0)


def random_select(space: DesignSpace, seed: int) -> int:
    return int(rng_for(seed, "rs").integers(0, space.m_pipelines))


def gt_select(raw_row: np.ndarray, failed_mask: np.ndarray | None = None) -> int:
    """Oracle: argmax raw test performance over non-failed cells (reporting only)."""
    raw_row = np.asarray(raw_row, dtype=np.float64)
    masked = raw_row.copy()
    if failed_mask is not None:
        masked[np.asarray(failed_mask, dtype=bool)] = -np.inf
    return int(np.argmax(masked))


def supervised_select(view: WeakView, space: DesignSpace, seed: int) -> int:
    """Train candidates on 80% of the train split, pick the best validation
    AUCROC against the revealed labels (unlabeled rows count as normal)."""
    if view.n_a < 2:
        raise ConfigurationError("supervised selection needs at least 2 labeled anomalies")
    rng = rng_for(seed, view.parent.name, "ss")
    n_lab = len(view.train_labeled_anomaly_idx)
    n_unl = len(view.train_unlabeled_idx)
    lab = view.train_labeled_anomaly_idx[rng.permutation(n_lab)]
    unl = view.train_unlabeled_idx[rng.permutation(n_unl)]
    lab_cut = min(max(int(round(SS_TRAIN_FRACTION * n_lab)), 1), n_lab - 1)
    unl_cut = min(max(int(round(SS_TRAIN_FRACTION * n_unl)), 1), n_unl - 1)
    sub_view = WeakView(
        parent=view.parent,
        train_unlabeled_idx=np.sort(unl[:unl_cut]),
        train_labeled_anomaly_idx=np.sort(lab[:lab_cut]),
        test_idx=np.sort(np.r_[unl[unl_cut:], lab[lab_cut:]]),
        n_a=lab_cut,
        seed=seed,
    )
    X_val = np.vstack([view.parent.X[unl[unl_cut:]], view.parent.X[lab[lab_cut:]]])
    y_val = np.r_[np.zeros(n_unl - unl_cut), np.ones(n_lab - lab_cut)]

    m = space.m_pipelines
    if m > SS_MAX_CANDIDATES:
        cand = sorted(rng.choice(m, size=SS_MAX_CANDIDATES, replace=False).tolist())
    else:
        cand = list(range(m))
    best_id, best_auc = cand[0], -np.inf
    for pid in cand:
        try:
            det = train_pipeline(sub_view, space.configs[pid], derive_seed(seed, "ss", pid))
            val_auc = auc_roc(score_samples(det, X_val), y_val)
        except AdforgeError:
            continue
        if val_auc > best_auc:
            best_id, best_auc = pid, val_auc
    return int(best_id)


def baseline_select(kind: str, view: WeakView, space: DesignSpace, seed: int, **kwargs) -> int:
    if kind == "rs":
        return random_select(space, seed)
    if kind == "ss":
        return supervised_select(view, space, seed)
    if kind == "gt":
        return gt_select(kwargs["raw_row"], kwargs.get("failed_mask"))
    raise ConfigurationError(f"unknown baseline kind {kind!r}")


def refine_space(perf_raw: np.ndarray, failed: np.ndarray, space: DesignSpace) -> DesignSpace:
    """Drop design choices whose mean raw performance over the training
    datasets falls below their dimension's median; keep the induced subspace."""
    perf_raw = np.asarray(perf_raw, dtype=np.float64)
    failed = np.asarray(failed, dtype=bool)
    kept: dict[str, set] = {}
    for dim in DIMENSION_ORDER:
        choice_means: dict[object, float] = {}
        for choice in {getattr(c, dim) for c in space.configs}:
            cols = [j for j, c in enumerate(space.configs) if getattr(c, dim) == choice]
            vals = perf_raw[:, cols][~failed[:, cols]]
            if vals.size:
                choice_means[choice] = float(vals.mean())
        if not choice_means:
            continue
        median = float(np.median(list(choice_means.values())))
        keep = {c for c, v in choice_means.items() if v >= median}
        if not keep:  # defensive: never empty a dimension
            keep = {max(choice_means, key=choice_means.get)}
        kept[dim] = keep
    configs = [
        c for c in space.configs if all(getattr(c, dim) in kept[dim] for dim in kept)
    ]
    if not configs:
        best = gt_select(np.nanmean(np.where(failed, np.nan, perf_raw), axis=0))
        configs = [space.configs[best]]
    return DesignSpace(mode=space.mode, configs=configs, seed=space.seed)
