"""Pure-NumPy implementations of the hot kernels.

Same call signatures as the compiled backend; used when the extension is not
built or when ADFORGE_NO_EXT=1.
"""

from __future__ import annotations

import numpy as np

TANH, RELU, LEAKY_RELU, SIGMOID = 0, 1, 2, 3


def act_forward(kind: int, x: np.ndarray, slope: float = 0.01) -> np.ndarray:
    if kind == TANH:
        return np.tanh(x)
    if kind == RELU:
        return np.maximum(x, 0.0)
    if kind == LEAKY_RELU:
        return np.where(x >= 0.0, x, slope * x)
    if kind == SIGMOID:
        out = np.empty_like(x)
        pos = x >= 0.0
        out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
        ex = np.exp(x[~pos])
        out[~pos] = ex / (1.0 + ex)
        return out
    raise ValueError(f"unknown activation kind {kind}")


def act_backward(
    kind: int, x: np.ndarray, y: np.ndarray, gy: np.ndarray, slope: float = 0.01
) -> np.ndarray:
    if kind == TANH:
        return gy * (1.0 - y * y)
    if kind == RELU:
        return gy * (x > 0.0)
    if kind == LEAKY_RELU:
        return gy * np.where(x >= 0.0, 1.0, slope)
    if kind == SIGMOID:
        return gy * y * (1.0 - y)
    raise ValueError(f"unknown activation kind {kind}")


def hist_sums(
    codes: np.ndarray, grad: np.ndarray, idx: np.ndarray, n_bins: int
) -> tuple[np.ndarray, np.ndarray]:
    """Per-(feature, bin) gradient sums and counts over the rows in ``idx``.

    codes: (n, f) uint8 bin codes; grad: (n,) float64; idx: (k,) int64.
    Returns (sums (f, n_bins), counts (f, n_bins)).
    """
    n_feat = codes.shape[1]
    sub = codes[idx].astype(np.int64)
    flat = sub + np.arange(n_feat, dtype=np.int64) * n_bins
    flat = flat.ravel()
    w = np.repeat(grad[idx], n_feat)
    sums = np.bincount(flat, weights=w, minlength=n_feat * n_bins)
    counts = np.bincount(flat, minlength=n_feat * n_bins)
    return sums.reshape(n_feat, n_bins), counts.reshape(n_feat, n_bins).astype(np.float64)
