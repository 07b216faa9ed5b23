"""Meta-training table: one row per (dataset, pipeline, n_a) with the
rank-normalized performance as regression target."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ContractError
from ..metafeat import META_SCHEMA_VERSION, META_VECTOR_LEN, MetaFeatureVector
from ..metrics import PerformanceMatrix
from ..space import DIMENSION_ORDER, DesignSpace, encode_pipeline

STD_FLOOR = 1e-9


@dataclass
class MetaTable:
    dataset_ids: list[str]  # per row
    meta: np.ndarray  # (rows, META_VECTOR_LEN) standardized
    n_a: np.ndarray  # (rows,)
    comp: np.ndarray  # (rows, n_dims)
    target: np.ndarray  # (rows,) in (0, 1]
    meta_mean: np.ndarray
    meta_std: np.ndarray
    schema_version: int = META_SCHEMA_VERSION

    @property
    def n_rows(self) -> int:
        return len(self.target)

    def inputs(self) -> np.ndarray:
        return np.hstack([self.meta, self.n_a.reshape(-1, 1), self.comp.astype(np.float64)])

    def groups(self) -> dict[str, np.ndarray]:
        out: dict[str, list[int]] = {}
        for i, ds in enumerate(self.dataset_ids):
            out.setdefault(ds, []).append(i)
        return {k: np.asarray(v) for k, v in out.items()}


def standardize_columns(M: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    mean = M.mean(axis=0)
    std = M.std(axis=0)
    safe = np.where(std > STD_FLOOR, std, 1.0)
    return (M - mean) / safe, mean, safe


def assemble_meta_table(
    perf_by_na: dict[int, PerformanceMatrix],
    metafeats: dict[str, MetaFeatureVector],
    space: DesignSpace,
) -> MetaTable:
    """Stack non-failed cells across all n_a values; failed cells stay out of
    the table but keep their worst-rank slot inside each PerformanceMatrix."""
    encodings = np.stack([encode_pipeline(c) for c in space.configs])
    rows_ds: list[str] = []
    rows_meta: list[np.ndarray] = []
    rows_na: list[int] = []
    rows_comp: list[np.ndarray] = []
    rows_target: list[float] = []
    for n_a, perf in sorted(perf_by_na.items()):
        p_rank = perf.p_rank()
        for i, ds in enumerate(perf.dataset_ids):
            mf = metafeats[ds]
            if mf.schema_version != META_SCHEMA_VERSION:
                raise ContractError(
                    f"meta-feature schema {mf.schema_version} != {META_SCHEMA_VERSION}"
                )
            if mf.values.shape[0] != META_VECTOR_LEN:
                raise ContractError("meta-feature vector length mismatch")
            for j in range(space.m_pipelines):
                if perf.failed[i, j]:
                    continue
                rows_ds.append(ds)
                rows_meta.append(mf.values)
                rows_na.append(n_a)
                rows_comp.append(encodings[j])
                rows_target.append(float(p_rank[i, j]))
    if not rows_target:
        raise ContractError("meta table would be empty")
    target = np.asarray(rows_target)
    if np.any(target <= 0.0) or np.any(target > 1.0):
        raise ContractError("targets must lie in (0, 1]")
    meta_raw = np.stack(rows_meta)
    meta_std_vals, mean, std = standardize_columns(meta_raw)
    return MetaTable(
        dataset_ids=rows_ds,
        meta=meta_std_vals,
        n_a=np.asarray(rows_na, dtype=np.float64),
        comp=np.stack(rows_comp),
        target=target,
        meta_mean=mean,
        meta_std=std,
    )


N_DIMS = len(DIMENSION_ORDER)
META_INPUT_LEN = META_VECTOR_LEN + 1 + N_DIMS
