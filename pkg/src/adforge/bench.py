"""Benchmark orchestration: fill the (dataset x pipeline x n_a x seed) grid of
run records, resumably and optionally in parallel, and collect performance
matrices plus per-dimension summaries from the store."""

from __future__ import annotations

import csv
import json
import time
from dataclasses import dataclass, field
from multiprocessing import Pool
from pathlib import Path

import numpy as np

from .data.dataset import Dataset, load_dataset, make_weak_view
from .errors import AdforgeError, ConfigurationError
from .metafeat import MetaFeatureVector, meta_features
from .metrics import PerformanceMatrix, auc_pr, auc_roc, inverse_rank_metric
from .seeds import derive_seed
from .space import DIMENSION_ORDER, DesignSpace, sample_space
from .store import ResultStore, RunRecord
from .training import score_samples, train_pipeline

METRICS = ("auc_roc", "auc_pr")


def cell_seed(master_seed: int, dataset: str, n_a: int, rep_seed: int) -> int:
    """The one seed a benchmark cell depends on (shared with LODO retraining)."""
    return derive_seed(master_seed, dataset, "cell", n_a, rep_seed)


def evaluate_cell(
    ds: Dataset, pipeline_id: int, cfg, n_a: int, rep_seed: int, master_seed: int
) -> RunRecord:
    start = time.perf_counter()
    seed = cell_seed(master_seed, ds.name, n_a, rep_seed)
    try:
        view = make_weak_view(ds, n_a, seed)
        det = train_pipeline(view, cfg, seed)
        scores = score_samples(det, view.test_X)
        rec = RunRecord(
            dataset=ds.name,
            pipeline_id=pipeline_id,
            config=cfg.to_dict(),
            n_a=n_a,
            seed=rep_seed,
            auc_roc=auc_roc(scores, view.test_y),
            auc_pr=auc_pr(scores, view.test_y),
            wall_time_s=time.perf_counter() - start,
            status="ok",
        )
    except AdforgeError as exc:
        rec = RunRecord(
            dataset=ds.name,
            pipeline_id=pipeline_id,
            config=cfg.to_dict(),
            n_a=n_a,
            seed=rep_seed,
            auc_roc=None,
            auc_pr=None,
            wall_time_s=time.perf_counter() - start,
            status="failed",
            error_tag=type(exc).__name__,
        )
    return rec


def _cell_worker(args) -> RunRecord:
    ds, pid, cfg, n_a, rep, master = args
    return evaluate_cell(ds, pid, cfg, n_a, rep, master)


@dataclass
class BenchmarkResult:
    space: DesignSpace
    dataset_names: list[str]
    n_a_values: list[int]
    seeds: list[int]
    # averaged over repeat seeds, one matrix per (metric, n_a)
    matrices: dict[tuple[str, int], PerformanceMatrix] = field(default_factory=dict)
    # per repeat seed, one matrix per (metric, n_a, seed)
    per_seed: dict[tuple[str, int, int], PerformanceMatrix] = field(default_factory=dict)
    metafeats: dict[str, MetaFeatureVector] = field(default_factory=dict)


def run_benchmark(
    datasets: list[Dataset],
    space: DesignSpace,
    n_a_values: list[int],
    seeds: list[int],
    master_seed: int,
    out_dir: str | Path,
    workers: int = 1,
) -> ResultStore:
    """Fill missing cells; existing records are kept, so reruns resume."""
    store = ResultStore(out_dir)
    space.save(Path(out_dir) / "space.json")
    tasks = []
    by_name = {ds.name: ds for ds in datasets}
    if len(by_name) != len(datasets):
        raise ConfigurationError("dataset names must be unique")
    for ds in datasets:
        for n_a in n_a_values:
            for rep in seeds:
                for pid, cfg in enumerate(space.configs):
                    if (ds.name, pid, n_a, rep) not in store:
                        tasks.append((ds, pid, cfg, n_a, rep, master_seed))
    if workers > 1 and len(tasks) > 1:
        with Pool(processes=workers) as pool:
            for rec in pool.imap_unordered(_cell_worker, tasks, chunksize=8):
                store.append(rec)
    else:
        for task in tasks:
            store.append(_cell_worker(task))
    return store


def compute_metafeatures(
    datasets: list[Dataset], master_seed: int, out_dir: str | Path | None = None
) -> dict[str, MetaFeatureVector]:
    """Label-blind meta-features per dataset, cached as JSON when out_dir is set."""
    cache_path = None if out_dir is None else Path(out_dir) / "metafeatures.json"
    cache: dict[str, list[float]] = {}
    if cache_path is not None and cache_path.exists():
        cache = json.loads(cache_path.read_text(encoding="utf-8"))
    out: dict[str, MetaFeatureVector] = {}
    changed = False
    for ds in datasets:
        if ds.name in cache:
            out[ds.name] = MetaFeatureVector(np.asarray(cache[ds.name], dtype=np.float64))
        else:
            out[ds.name] = meta_features(ds.X, derive_seed(master_seed, ds.name, "metafeat"))
            cache[ds.name] = out[ds.name].values.tolist()
            changed = True
    if cache_path is not None and changed:
        cache_path.write_text(json.dumps(cache), encoding="utf-8")
    return out


def collect_results(
    store: ResultStore,
    datasets: list[Dataset],
    space: DesignSpace,
    n_a_values: list[int],
    seeds: list[int],
    master_seed: int,
    out_dir: str | Path | None = None,
) -> BenchmarkResult:
    """Assemble averaged and per-seed performance matrices from run records."""
    names = [ds.name for ds in datasets]
    n, m = len(names), space.m_pipelines
    result = BenchmarkResult(space, names, list(n_a_values), list(seeds))
    for metric in METRICS:
        for n_a in n_a_values:
            vals = np.full((len(seeds), n, m), np.nan)
            fails = np.zeros((len(seeds), n, m), dtype=bool)
            for r, rep in enumerate(seeds):
                for i, name in enumerate(names):
                    for j in range(m):
                        rec = store.get((name, j, n_a, rep))
                        if rec is None:
                            raise ConfigurationError(
                                f"missing record for ({name}, {j}, {n_a}, {rep})"
                            )
                        if rec.status == "ok":
                            vals[r, i, j] = getattr(rec, metric)
                        else:
                            fails[r, i, j] = True
                result.per_seed[(metric, n_a, rep)] = PerformanceMatrix(
                    names, np.nan_to_num(vals[r], nan=0.0), fails[r]
                )
            failed_any = fails.any(axis=0)
            with np.errstate(invalid="ignore"):
                avg = np.nanmean(np.where(fails, np.nan, vals), axis=0)
            result.matrices[(metric, n_a)] = PerformanceMatrix(
                names, np.nan_to_num(avg, nan=0.0), failed_any
            )
    result.metafeats = compute_metafeatures(datasets, master_seed, out_dir)
    return result


def dimension_summary(result: BenchmarkResult, metric: str, n_a: int) -> list[dict]:
    """Fix one design choice, aggregate over the sampled rest (box-plot protocol)."""
    perf = result.matrices[(metric, n_a)]
    inv = np.stack(
        [inverse_rank_metric(perf.raw[i], perf.failed[i]) for i in range(perf.raw.shape[0])]
    )
    rows = []
    for dim in DIMENSION_ORDER:
        choices = sorted({str(getattr(c, dim)) for c in result.space.configs})
        for choice in choices:
            cols = [
                j for j, c in enumerate(result.space.configs) if str(getattr(c, dim)) == choice
            ]
            ok = ~perf.failed[:, cols]
            if not ok.any():
                continue  # empty cell sets are omitted, never NaN rows
            rows.append(
                {
                    "dimension": dim,
                    "choice": choice,
                    "n_a": n_a,
                    "metric": metric,
                    "mean_value": float(perf.raw[:, cols][ok].mean()),
                    "mean_inverse_rank": float(inv[:, cols][ok].mean()),
                    "count": int(ok.sum()),
                }
            )
    return rows


def write_dimension_summaries(
    result: BenchmarkResult, out_dir: str | Path
) -> Path:
    path = Path(out_dir) / "dimension_summary.csv"
    fieldnames = ["dimension", "choice", "n_a", "metric", "mean_value", "mean_inverse_rank", "count"]
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=fieldnames)
        writer.writeheader()
        for metric in METRICS:
            for n_a in result.n_a_values:
                for row in dimension_summary(result, metric, n_a):
                    writer.writerow(row)
    return path


def load_config(path: str | Path) -> dict:
    cfg = json.loads(Path(path).read_text(encoding="utf-8"))
    required = {"datasets", "space_mode", "m_pipelines", "n_a_values", "seeds"}
    missing = required - set(cfg)
    if missing:
        raise ConfigurationError(f"config missing keys: {sorted(missing)}")
    return cfg


def run_from_config(
    config: dict, out_dir: str | Path, master_seed: int, workers: int = 1
) -> tuple[ResultStore, BenchmarkResult]:
    datasets = [load_dataset(p) for p in config["datasets"]]
    space = sample_space(
        config["space_mode"], config["m_pipelines"], derive_seed(master_seed, "space")
    )
    store = run_benchmark(
        datasets, space, config["n_a_values"], config["seeds"], master_seed, out_dir, workers
    )
    result = collect_results(
        store, datasets, space, config["n_a_values"], config["seeds"], master_seed, out_dir
    )
    write_dimension_summaries(result, out_dir)
    return store, result
