"""Fixed-order meta-feature vector: statistical block plus four landmarker
blocks, NaN-free by construction (0-imputation with paired indicator flags)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .landmarkers import (
    HBOS_BLOCK_LEN,
    IFOREST_BLOCK_LEN,
    LODA_BLOCK_LEN,
    PCA_BLOCK_LEN,
    hbos_features,
    iforest_features,
    landmarker_features,
    loda_features,
    pca_features,
)
from .statistical import STAT_BLOCK_LEN, statistical_features

META_SCHEMA_VERSION = 1

_RAW_LEN = STAT_BLOCK_LEN + IFOREST_BLOCK_LEN + HBOS_BLOCK_LEN + LODA_BLOCK_LEN + PCA_BLOCK_LEN
META_VECTOR_LEN = 2 * _RAW_LEN  # values followed by their NaN-imputation indicators

BLOCK_OFFSETS = {}
_off = 0
for _name, _len in (
    ("statistical", STAT_BLOCK_LEN),
    ("iforest", IFOREST_BLOCK_LEN),
    ("hbos", HBOS_BLOCK_LEN),
    ("loda", LODA_BLOCK_LEN),
    ("pca", PCA_BLOCK_LEN),
):
    BLOCK_OFFSETS[_name] = (_off, _off + _len)
    _off += _len


@dataclass
class MetaFeatureVector:
    values: np.ndarray
    schema_version: int = META_SCHEMA_VERSION
    block_offsets: dict = None

    def __post_init__(self):
        if self.block_offsets is None:
            self.block_offsets = dict(BLOCK_OFFSETS)


def meta_features(X: np.ndarray, seed: int = 0) -> MetaFeatureVector:
    """Label-blind descriptor of a feature matrix; deterministic given (X, seed)."""
    X = np.asarray(X, dtype=np.float64)
    raw = np.concatenate([statistical_features(X, seed), landmarker_features(X, seed)])
    indicators = (~np.isfinite(raw)).astype(np.float64)
    values = np.concatenate([np.nan_to_num(raw, nan=0.0, posinf=0.0, neginf=0.0), indicators])
    assert values.shape[0] == META_VECTOR_LEN
    return MetaFeatureVector(values)


__all__ = [
    "META_SCHEMA_VERSION",
    "META_VECTOR_LEN",
    "BLOCK_OFFSETS",
    "MetaFeatureVector",
    "meta_features",
    "statistical_features",
    "landmarker_features",
    "iforest_features",
    "hbos_features",
    "loda_features",
    "pca_features",
]
