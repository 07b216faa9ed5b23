"""Statistical descriptors of a feature matrix.

Undefined entries (e.g. skewness of a constant feature) are returned as NaN;
the assembling layer imputes 0 and raises a paired indicator flag.
"""

from __future__ import annotations

import warnings

import numpy as np
from scipy import stats

from ..errors import ContractError
from ..seeds import rng_for

MAX_EXACT_PAIRS_P = 50  # above this many features, sample feature pairs
N_SAMPLED_PAIRS = 50

BASIC_STATS = (
    "mean", "median", "var", "min", "max", "std",
    "q1", "q25", "q75", "q99", "iqr",
    "norm_mean", "norm_median", "range", "gini", "mad", "aad", "qcd", "cv",
    "pct_outside_1_99", "pct_outside_3sigma",
)
SIXWAY_BLOCKS = ("skewness", "kurtosis", "correlation", "covariance", "sparsity", "anova_p", "norm_entropy")
MOMENT_ORDERS = (5, 6, 7, 8, 9, 10)

# 6 size stats + basics x (mean, std) + normality fraction + moments x (mean, std)
# + six-way blocks x 6 + %categorical (fixed 0: all ingested features are numeric)
STAT_BLOCK_LEN = 6 + 2 * len(BASIC_STATS) + 1 + 2 * len(MOMENT_ORDERS) + 6 * len(SIXWAY_BLOCKS) + 1


def _skew(v: np.ndarray) -> float:
    s = v.std()
    if s == 0.0 or len(v) < 2:
        return np.nan
    return float(np.mean((v - v.mean()) ** 3) / s**3)


def _kurt(v: np.ndarray) -> float:
    s = v.std()
    if s == 0.0 or len(v) < 2:
        return np.nan
    return float(np.mean((v - v.mean()) ** 4) / s**4)


def _agg6(v: np.ndarray) -> list[float]:
    """min/max/mean/std/skewness/kurtosis of a value collection."""
    v = np.asarray(v, dtype=np.float64)
    v = v[np.isfinite(v)]
    if v.size == 0:
        return [np.nan] * 6
    return [float(v.min()), float(v.max()), float(v.mean()), float(v.std()), _skew(v), _kurt(v)]


def _gini(x: np.ndarray) -> float:
    mu = x.mean()
    if mu == 0.0:
        return np.nan
    xs = np.sort(x)
    n = len(xs)
    return float(np.sum((2 * np.arange(1, n + 1) - n - 1) * xs) / (n * n * mu))


def _agg2(per_feature: np.ndarray) -> list[float]:
    v = per_feature[np.isfinite(per_feature)]
    if v.size == 0:
        return [np.nan, np.nan]
    return [float(v.mean()), float(v.std())]


def statistical_features(X: np.ndarray, seed: int = 0) -> np.ndarray:
    """Fixed-length block (STAT_BLOCK_LEN) of dataset-level statistics."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < 4:
        raise ContractError("statistical_features needs a 2-D matrix with >= 4 rows")
    n, p = X.shape
    out: list[float] = [n, p, p / n, np.log(n), np.log(p), np.log(n / p)]

    mu = X.mean(axis=0)
    med = np.median(X, axis=0)
    sd = X.std(axis=0)
    mx, mn = X.max(axis=0), X.min(axis=0)
    q01, q25, q75, q99 = (np.percentile(X, q, axis=0) for q in (1, 25, 75, 99))
    with np.errstate(divide="ignore", invalid="ignore"):
        basics = {
            "mean": mu,
            "median": med,
            "var": X.var(axis=0),
            "min": mn,
            "max": mx,
            "std": sd,
            "q1": q01,
            "q25": q25,
            "q75": q75,
            "q99": q99,
            "iqr": q75 - q25,
            "norm_mean": np.where(mx != 0, mu / mx, np.nan),
            "norm_median": np.where(mx != 0, med / mx, np.nan),
            "range": mx - mn,
            "gini": np.array([_gini(X[:, j]) for j in range(p)]),
            "mad": np.median(np.abs(X - med), axis=0),
            "aad": np.mean(np.abs(X - med), axis=0),
            "qcd": np.where(q75 + q25 != 0, (q75 - q25) / (q75 + q25), np.nan),
            "cv": np.where(mu != 0, sd / mu, np.nan),
            "pct_outside_1_99": np.mean((X < q01) | (X > q99), axis=0),
            "pct_outside_3sigma": np.mean(np.abs(X - mu) > 3 * sd, axis=0),
        }
    for name in BASIC_STATS:
        out += _agg2(basics[name])

    # fraction of features a skew/kurtosis omnibus normality test cannot reject
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            _, pvals = stats.normaltest(X, axis=0)
        out.append(float(np.mean(pvals > 0.05)))
    except ValueError:
        out.append(np.nan)

    with np.errstate(divide="ignore", invalid="ignore"):
        sd_safe = np.where(sd > 0, sd, np.nan)
        for k in MOMENT_ORDERS:
            mk = np.mean((X - mu) ** k, axis=0) / sd_safe**k
            out += _agg2(mk)

    skews = np.array([_skew(X[:, j]) for j in range(p)])
    kurts = np.array([_kurt(X[:, j]) for j in range(p)])

    pair_rng = rng_for(seed, "stat_pairs")
    if p < 2:
        pairs = []
    elif p <= MAX_EXACT_PAIRS_P:
        pairs = [(i, j) for i in range(p) for j in range(i + 1, p)]
    else:
        pairs = set()
        while len(pairs) < N_SAMPLED_PAIRS:
            i, j = sorted(pair_rng.integers(0, p, size=2))
            if i != j:
                pairs.add((int(i), int(j)))
        pairs = sorted(pairs)
    corrs, covs = [], []
    for i, j in pairs:
        xi, xj = X[:, i], X[:, j]
        covs.append(float(np.cov(xi, xj)[0, 1]))
        si, sj = xi.std(), xj.std()
        corrs.append(float(np.corrcoef(xi, xj)[0, 1]) if si > 0 and sj > 0 else np.nan)

    sparsity = np.array([len(np.unique(X[:, j])) / n for j in range(p)])

    anova_rng = rng_for(seed, "anova")
    anova_p = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for j in range(p):
            # halves drawn from the sorted values so the grouping is seeded yet
            # independent of row order
            vals = np.sort(X[:, j])
            perm = anova_rng.permutation(n)
            a, b = vals[perm[: n // 2]], vals[perm[n // 2 :]]
            if a.std() == 0 and b.std() == 0:
                anova_p.append(np.nan)
            else:
                anova_p.append(float(stats.f_oneway(a, b).pvalue))

    entropies = []
    for j in range(p):
        _, counts = np.unique(X[:, j], return_counts=True)
        probs = counts / n
        h = float(-(probs * np.log2(probs)).sum())
        entropies.append(h / np.log2(n) if n > 1 else np.nan)

    sixway = {
        "skewness": skews,
        "kurtosis": kurts,
        "correlation": np.asarray(corrs, dtype=np.float64),
        "covariance": np.asarray(covs, dtype=np.float64),
        "sparsity": sparsity,
        "anova_p": np.asarray(anova_p, dtype=np.float64),
        "norm_entropy": np.asarray(entropies, dtype=np.float64),
    }
    for name in SIXWAY_BLOCKS:
        out += _agg6(sixway[name])

    out.append(0.0)  # %categorical: ingestion is numeric-only, kept as an explicit slot
    assert len(out) == STAT_BLOCK_LEN
    return np.asarray(out, dtype=np.float64)
