"""Report generation from stored run records: long-format, per-pipeline and
per-choice tables with rank-normalized and inverse-rank columns."""

from __future__ import annotations

import csv
from collections import defaultdict
from pathlib import Path

import numpy as np

from .errors import ConfigurationError
from .metrics import inverse_rank_metric, rank_normalize
from .store import ResultStore

REPORT_KINDS = ("long", "per_pipeline", "per_choice", "all")
_DIMENSIONS_FROM_CONFIG = True


def _require_records(store: ResultStore):
    records = store.records()
    if not records:
        raise ConfigurationError("result store is empty")
    return records


def write_long_csv(store: ResultStore, out_path: Path) -> None:
    records = _require_records(store)
    with out_path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["dataset", "pipeline_id", "n_a", "seed", "auc_roc", "auc_pr", "status", "error_tag"]
        )
        for rec in records:  # store.records() is sorted by (dataset, pipeline, n_a, seed)
            writer.writerow(
                [
                    rec.dataset,
                    rec.pipeline_id,
                    rec.n_a,
                    rec.seed,
                    "" if rec.auc_roc is None else rec.auc_roc,
                    "" if rec.auc_pr is None else rec.auc_pr,
                    rec.status,
                    rec.error_tag or "",
                ]
            )


def _mean_cells(store: ResultStore) -> dict:
    """(dataset, n_a) -> {pipeline_id: (mean_roc, mean_pr, failed, config)}."""
    cells: dict = defaultdict(lambda: defaultdict(list))
    configs: dict = {}
    for rec in store.records():
        cells[(rec.dataset, rec.n_a)][rec.pipeline_id].append(rec)
        configs[rec.pipeline_id] = rec.config
    out = {}
    for key, by_pid in cells.items():
        row = {}
        for pid, recs in sorted(by_pid.items()):
            oks = [r for r in recs if r.status == "ok"]
            if oks:
                row[pid] = (
                    float(np.mean([r.auc_roc for r in oks])),
                    float(np.mean([r.auc_pr for r in oks])),
                    False,
                    configs[pid],
                )
            else:
                row[pid] = (0.0, 0.0, True, configs[pid])
        out[key] = row
    return out


def write_per_pipeline_csv(store: ResultStore, out_path: Path) -> None:
    cells = _mean_cells(store)
    with out_path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            [
                "dataset",
                "n_a",
                "pipeline_id",
                "auc_roc",
                "auc_pr",
                "rank_auc_roc",
                "inverse_rank_auc_roc",
                "failed",
            ]
        )
        for (dataset, n_a) in sorted(cells):
            row = cells[(dataset, n_a)]
            pids = sorted(row)
            raw = np.array([row[p][0] for p in pids])
            failed = np.array([row[p][2] for p in pids])
            ranks = rank_normalize(raw, failed)
            inv = 1.0 - ranks
            for i, pid in enumerate(pids):
                writer.writerow(
                    [
                        dataset,
                        n_a,
                        pid,
                        row[pid][0],
                        row[pid][1],
                        ranks[i],
                        inv[i],
                        int(failed[i]),
                    ]
                )


def write_per_choice_csv(store: ResultStore, out_path: Path) -> None:
    cells = _mean_cells(store)
    agg: dict = defaultdict(list)  # (dimension, choice, n_a) -> [(roc, pr, inv_rank)]
    for (dataset, n_a), row in cells.items():
        pids = sorted(row)
        raw = np.array([row[p][0] for p in pids])
        failed = np.array([row[p][2] for p in pids])
        inv = inverse_rank_metric(raw, failed)
        for i, pid in enumerate(pids):
            if failed[i]:
                continue
            for dim, choice in row[pid][3].items():
                agg[(dim, str(choice), n_a)].append((row[pid][0], row[pid][1], inv[i]))
    with out_path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["dimension", "choice", "n_a", "mean_auc_roc", "mean_auc_pr", "mean_inverse_rank", "count"]
        )
        for key in sorted(agg):
            vals = np.asarray(agg[key])
            writer.writerow(
                [
                    key[0],
                    key[1],
                    key[2],
                    float(vals[:, 0].mean()),
                    float(vals[:, 1].mean()),
                    float(vals[:, 2].mean()),
                    len(vals),
                ]
            )


def report(results_dir: str | Path, kind: str = "all", out_dir: str | Path | None = None) -> list[Path]:
    """Emit the requested report CSVs next to the records (or into out_dir)."""
    if kind not in REPORT_KINDS:
        raise ConfigurationError(f"unknown report kind {kind!r}")
    store = ResultStore(results_dir)
    _require_records(store)
    out = Path(out_dir) if out_dir is not None else Path(results_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    if kind in ("long", "all"):
        path = out / "report_long.csv"
        write_long_csv(store, path)
        written.append(path)
    if kind in ("per_pipeline", "all"):
        path = out / "report_per_pipeline.csv"
        write_per_pipeline_csv(store, path)
        written.append(path)
    if kind in ("per_choice", "all"):
        path = out / "report_per_choice.csv"
        write_per_choice_csv(store, path)
        written.append(path)
    return written
