"""Landmarker meta-features from four internal unsupervised detectors:
isolation forest, histogram profiles, random-projection histograms, PCA."""

from __future__ import annotations

import numpy as np

from ..errors import ContractError
from ..seeds import rng_for
from .statistical import _agg6

IFOREST_TREES = 100
IFOREST_SUBSAMPLE = 256
HBOS_BINS = 10
LODA_PROJECTIONS = 100
LODA_BINS = 10
PCA_TOP = 3

IFOREST_BLOCK_LEN = 4 * 6
HBOS_BLOCK_LEN = 2 * 6
LODA_BLOCK_LEN = 4 * 6
PCA_BLOCK_LEN = 2 * PCA_TOP


class _IsoTree:
    __slots__ = ("depth", "n_leaves", "split_counts")

    def __init__(self, X: np.ndarray, rng: np.random.Generator, height_limit: int):
        d = X.shape[1]
        self.depth = 0
        self.n_leaves = 0
        self.split_counts = np.zeros(d)
        self._grow(X, 0, rng, height_limit)

    def _grow(self, X: np.ndarray, depth: int, rng, limit: int) -> None:
        self.depth = max(self.depth, depth)
        if depth >= limit or X.shape[0] <= 1:
            self.n_leaves += 1
            return
        lo, hi = X.min(axis=0), X.max(axis=0)
        splittable = np.flatnonzero(hi > lo)
        if splittable.size == 0:
            self.n_leaves += 1
            return
        feat = int(splittable[rng.integers(0, splittable.size)])
        thr = rng.uniform(lo[feat], hi[feat])
        self.split_counts[feat] += 1
        left = X[:, feat] < thr
        self._grow(X[left], depth + 1, rng, limit)
        self._grow(X[~left], depth + 1, rng, limit)


def iforest_features(X: np.ndarray, seed: int) -> np.ndarray:
    """Tree depth / leaf count distributions plus split-frequency importances."""
    n, d = X.shape
    rng = rng_for(seed, "iforest")
    psi = min(IFOREST_SUBSAMPLE, n)
    height_limit = int(np.ceil(np.log2(max(psi, 2))))
    depths, leaves, importances = [], [], []
    for _ in range(IFOREST_TREES):
        idx = np.sort(rng.choice(n, size=psi, replace=False))
        tree = _IsoTree(X[idx], rng, height_limit)
        depths.append(tree.depth)
        leaves.append(tree.n_leaves)
        total = tree.split_counts.sum()
        importances.append(tree.split_counts / total if total > 0 else tree.split_counts)
    imp = np.asarray(importances)
    out = (
        _agg6(np.asarray(depths, dtype=np.float64))
        + _agg6(np.asarray(leaves, dtype=np.float64))
        + _agg6(imp.mean(axis=0))
        + _agg6(imp.max(axis=0))
    )
    return np.asarray(out, dtype=np.float64)


def hbos_histogram(x: np.ndarray, bins: int = HBOS_BINS) -> tuple[np.ndarray, float]:
    """Equal-width histogram densities and the bin width for one feature."""
    dens, edges = np.histogram(x, bins=bins, density=True)
    return dens, float(edges[1] - edges[0])


def hbos_features(X: np.ndarray) -> np.ndarray:
    means, maxes = [], []
    for j in range(X.shape[1]):
        dens, _ = hbos_histogram(X[:, j])
        means.append(dens.mean())
        maxes.append(dens.max())
    return np.asarray(_agg6(np.asarray(means)) + _agg6(np.asarray(maxes)), dtype=np.float64)


def loda_projections(d: int, seed: int, k: int = LODA_PROJECTIONS) -> np.ndarray:
    """k random unit projections, each with ceil(sqrt(d)) nonzero Gaussian coords."""
    rng = rng_for(seed, "loda")
    nnz = int(np.ceil(np.sqrt(d)))
    W = np.zeros((k, d))
    for i in range(k):
        pos = rng.choice(d, size=nnz, replace=False)
        W[i, pos] = rng.standard_normal(nnz)
        W[i] /= np.linalg.norm(W[i]) or 1.0
    return W


def loda_features(X: np.ndarray, seed: int) -> np.ndarray:
    W = loda_projections(X.shape[1], seed)
    Z = X @ W.T  # (n, k)
    proj_mean = Z.mean(axis=0)
    proj_max = Z.max(axis=0)
    hist_means, hist_maxes = [], []
    for i in range(Z.shape[1]):
        dens, _ = np.histogram(Z[:, i], bins=LODA_BINS, density=True)
        hist_means.append(dens.mean())
        hist_maxes.append(dens.max())
    out = (
        _agg6(proj_mean)
        + _agg6(proj_max)
        + _agg6(np.asarray(hist_means))
        + _agg6(np.asarray(hist_maxes))
    )
    return np.asarray(out, dtype=np.float64)


def pca_features(X: np.ndarray) -> np.ndarray:
    """Explained-variance ratios and singular values of the top 3 components,
    zero-padded when the matrix has fewer directions."""
    Xc = X - X.mean(axis=0)
    s = np.linalg.svd(Xc, compute_uv=False)
    total = float((s**2).sum())
    ratios = (s**2) / total if total > 0 else np.zeros_like(s)
    ratios = np.r_[ratios, np.zeros(PCA_TOP)][:PCA_TOP]
    svals = np.r_[s, np.zeros(PCA_TOP)][:PCA_TOP]
    return np.concatenate([ratios, svals]).astype(np.float64)


def landmarker_features(X: np.ndarray, seed: int) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.shape[0] < 20:
        raise ContractError("landmarker_features needs at least 20 rows")
    return np.concatenate(
        [
            iforest_features(X, seed),
            hbos_features(X),
            loda_features(X, seed),
            pca_features(X),
        ]
    )
