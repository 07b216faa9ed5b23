"""Synthetic anomaly generation: local, global, cluster and dependency regimes
injected into a pool of normal samples."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigurationError
from ..seeds import rng_for
from .dataset import Dataset

ANOMALY_KINDS = ("local", "global", "cluster", "dependency")
VAR_FLOOR = 1e-6


@dataclass
class SynthConfig:
    anomaly_kind: str
    alpha: float | None = None
    anomaly_ratio: float = 0.05
    gmm_components: int = 2
    seed: int = 0

    def __post_init__(self):
        if self.anomaly_kind not in ANOMALY_KINDS:
            raise ConfigurationError(f"unknown anomaly kind {self.anomaly_kind!r}")
        if self.alpha is None:
            self.alpha = 1.1 if self.anomaly_kind == "global" else 5.0
        if not 0.0 < self.anomaly_ratio < 0.5:
            raise ConfigurationError("anomaly_ratio must lie in (0, 0.5)")
        if self.anomaly_kind == "global" and self.alpha <= 1.0:
            raise ConfigurationError("global anomalies need alpha > 1")


@dataclass
class DiagGMM:
    weights: np.ndarray  # (k,)
    means: np.ndarray  # (k, d)
    variances: np.ndarray  # (k, d)

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        comp = rng.choice(len(self.weights), size=n, p=self.weights)
        noise = rng.standard_normal((n, self.means.shape[1]))
        return self.means[comp] + noise * np.sqrt(self.variances[comp])


def fit_diag_gmm(X: np.ndarray, k: int, rng: np.random.Generator, n_iter: int = 100) -> DiagGMM:
    """EM for a diagonal-covariance mixture; variances floored at VAR_FLOOR."""
    n, d = X.shape
    k = min(k, n)
    means = X[rng.choice(n, size=k, replace=False)].copy()
    variances = np.tile(np.maximum(X.var(axis=0), VAR_FLOOR), (k, 1))
    weights = np.full(k, 1.0 / k)
    prev_ll = -np.inf
    for _ in range(n_iter):
        # E-step in log space
        log_p = (
            -0.5 * np.sum((X[:, None, :] - means) ** 2 / variances + np.log(variances), axis=2)
            + np.log(weights)
        )
        shift = log_p.max(axis=1, keepdims=True)
        resp = np.exp(log_p - shift)
        total = resp.sum(axis=1, keepdims=True)
        resp /= total
        ll = float(np.sum(np.log(total) + shift))
        # M-step
        nk = resp.sum(axis=0) + 1e-12
        weights = nk / n
        means = (resp.T @ X) / nk[:, None]
        variances = np.maximum(
            (resp.T @ (X**2)) / nk[:, None] - means**2, VAR_FLOOR
        )
        if abs(ll - prev_ll) < 1e-8 * max(1.0, abs(prev_ll)):
            break
        prev_ll = ll
    return DiagGMM(weights, means, variances)


def sample_normal_base(n: int, d: int, seed: int, components: int = 2) -> np.ndarray:
    """Clustered normal data from a randomly placed diagonal mixture."""
    rng = rng_for(seed, "normal_base")
    means = rng.uniform(-3.0, 3.0, size=(components, d))
    variances = rng.uniform(0.1, 0.5, size=(components, d))
    gmm = DiagGMM(np.full(components, 1.0 / components), means, variances)
    return gmm.sample(n, rng)


def synthesize(base, cfg: SynthConfig, name: str | None = None) -> Dataset:
    """Append cfg-controlled synthetic anomalies to the normal rows of ``base``."""
    if isinstance(base, Dataset):
        normals = base.X[base.y == 0]
        base_name = base.name
    else:
        normals = np.asarray(base, dtype=np.float64)
        base_name = "base"
    if normals.shape[0] < 50:
        raise ConfigurationError("synthesize needs at least 50 normal samples")
    rng = rng_for(cfg.seed, base_name, "synth", cfg.anomaly_kind)
    n_anom = max(2, int(round(cfg.anomaly_ratio * normals.shape[0])))
    alpha = float(cfg.alpha)

    if cfg.anomaly_kind in ("local", "cluster"):
        gmm = fit_diag_gmm(normals, cfg.gmm_components, rng)
        if cfg.anomaly_kind == "local":
            gmm = DiagGMM(gmm.weights, gmm.means, gmm.variances * alpha**2)
        else:
            gmm = DiagGMM(gmm.weights, gmm.means * alpha, gmm.variances)
        anomalies = gmm.sample(n_anom, rng)
    elif cfg.anomaly_kind == "global":
        lo, hi = normals.min(axis=0), normals.max(axis=0)
        mid, half = (lo + hi) / 2.0, (hi - lo) / 2.0
        anomalies = rng.uniform(mid - alpha * half, mid + alpha * half, size=(n_anom, normals.shape[1]))
    else:  # dependency: shuffle each feature independently among sampled normal rows
        picks = normals[rng.integers(0, normals.shape[0], size=n_anom)].copy()
        for j in range(picks.shape[1]):
            picks[:, j] = picks[rng.permutation(n_anom), j]
        anomalies = picks

    X = np.vstack([normals, anomalies])
    y = np.r_[np.zeros(normals.shape[0], dtype=np.int64), np.ones(n_anom, dtype=np.int64)]
    ds_name = name or f"{base_name}_{cfg.anomaly_kind}_s{cfg.seed}"
    return Dataset(ds_name, X, y, provenance=f"synthetic({cfg.anomaly_kind},{base_name},{cfg.seed})")
