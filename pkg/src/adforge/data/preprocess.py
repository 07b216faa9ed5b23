"""Train-fitted feature scaling: minmax to [0,1] or per-row unit norm."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigurationError
from .dataset import WeakView

KINDS = ("minmax", "normalization")


@dataclass
class PreprocessParams:
    kind: str
    f_min: np.ndarray | None = None
    f_max: np.ndarray | None = None
    target_range: tuple[float, float] = (0.0, 1.0)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "f_min": None if self.f_min is None else self.f_min.tolist(),
            "f_max": None if self.f_max is None else self.f_max.tolist(),
            "target_range": list(self.target_range),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PreprocessParams":
        return cls(
            kind=d["kind"],
            f_min=None if d["f_min"] is None else np.asarray(d["f_min"], dtype=np.float64),
            f_max=None if d["f_max"] is None else np.asarray(d["f_max"], dtype=np.float64),
            target_range=tuple(d["target_range"]),
        )


def fit_preprocess(X_train: np.ndarray, kind: str) -> PreprocessParams:
    if kind not in KINDS:
        raise ConfigurationError(f"unknown preprocessing kind {kind!r}")
    if kind == "minmax":
        return PreprocessParams("minmax", X_train.min(axis=0), X_train.max(axis=0))
    return PreprocessParams("normalization")


def apply_preprocess(params: PreprocessParams, X: np.ndarray, clip: bool = False) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if params.kind == "minmax":
        a, b = params.target_range
        span = params.f_max - params.f_min
        safe = np.where(span > 0.0, span, 1.0)
        out = (X - params.f_min) * (b - a) / safe + a
        out[:, span == 0.0] = a  # constant train feature maps to the range floor
        if clip:
            out = np.clip(out, a, b)
        return out
    norms = np.linalg.norm(X, axis=1, keepdims=True)
    return np.divide(X, norms, out=X.copy(), where=norms != 0.0)


def preprocess(view: WeakView, kind: str) -> tuple[np.ndarray, np.ndarray, PreprocessParams]:
    """Fit on the view's train rows only; test values are clipped under minmax."""
    X_train, _ = view.train_matrix()
    params = fit_preprocess(X_train, kind)
    return (
        apply_preprocess(params, X_train),
        apply_preprocess(params, view.test_X, clip=True),
        params,
    )
