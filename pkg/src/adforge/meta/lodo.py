"""Leave-one-dataset-out evaluation of the meta-predictor against RS/SS/GT."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..bench import BenchmarkResult, cell_seed
from ..data.dataset import Dataset, make_weak_view
from ..errors import AdforgeError
from ..metrics import auc_pr, auc_roc
from ..seeds import derive_seed
from .predictor import MetaPredictor, predict_pipeline_ranks, train_meta_predictor
from .select import ensemble_scores, gt_select, random_select, select_pipelines, supervised_select
from .table import assemble_meta_table
from ..training import train_pipeline

TOP_K = 5
METHODS = ("meta_top1", "meta_topk", "rs", "ss", "gt")


@dataclass
class LodoReport:
    n_a: int
    backend: str
    loss_kind: str
    k: int
    folds: list[dict] = field(default_factory=list)

    def mean(self, method: str, metric: str = "auc_roc") -> float:
        vals = [f[method][metric] for f in self.folds if np.isfinite(f[method][metric])]
        return float(np.mean(vals)) if vals else float("nan")

    def write(self, out_dir: str | Path) -> None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        stem = f"lodo_{self.backend}_{self.loss_kind}_na{self.n_a}"
        with (out_dir / f"{stem}.jsonl").open("w", encoding="utf-8") as fh:
            for fold in self.folds:
                fh.write(json.dumps(fold) + "\n")
        with (out_dir / f"{stem}.csv").open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["dataset", "method", "auc_roc", "auc_pr"])
            for fold in self.folds:
                for method in METHODS:
                    writer.writerow(
                        [fold["dataset"], method, fold[method]["auc_roc"], fold[method]["auc_pr"]]
                    )


def train_fold_predictor(
    result: BenchmarkResult,
    held_out: str,
    backend: str,
    loss_kind: str,
    master_seed: int,
) -> MetaPredictor:
    """Meta-predictor trained with the held-out dataset's rows, meta-features
    and standardization statistics excluded entirely."""
    train_perf = {}
    for n_a in result.n_a_values:
        full = result.matrices[("auc_roc", n_a)]
        keep = [i for i, name in enumerate(full.dataset_ids) if name != held_out]
        train_perf[n_a] = type(full)(
            [full.dataset_ids[i] for i in keep], full.raw[keep], full.failed[keep]
        )
    feats = {k: v for k, v in result.metafeats.items() if k != held_out}
    table = assemble_meta_table(train_perf, feats, result.space)
    return train_meta_predictor(
        table, backend, loss_kind, derive_seed(master_seed, "fold", held_out)
    )


def run_lodo(
    datasets: list[Dataset],
    result: BenchmarkResult,
    n_a: int,
    backend: str,
    loss_kind: str,
    master_seed: int,
    k: int = TOP_K,
    out_dir: str | Path | None = None,
) -> LodoReport:
    """For each fold: meta-train on the rest, select top-1/top-k zero-shot,
    evaluate on the held-out dataset's weak view against RS/SS/GT."""
    by_name = {ds.name: ds for ds in datasets}
    space = result.space
    report = LodoReport(n_a=n_a, backend=backend, loss_kind=loss_kind, k=k)
    avg_roc = result.matrices[("auc_roc", n_a)]
    avg_pr = result.matrices[("auc_pr", n_a)]

    for fold_name in result.dataset_names:
        ds = by_name[fold_name]
        row = avg_roc.row(fold_name)
        predictor = train_fold_predictor(result, fold_name, backend, loss_kind, master_seed)
        ranks = predict_pipeline_ranks(predictor, result.metafeats[fold_name], n_a, space)
        top1 = select_pipelines(ranks, 1)[0]
        topk = select_pipelines(ranks, min(k, space.m_pipelines))

        fold: dict = {"dataset": fold_name, "n_a": n_a, "top1_id": top1, "topk_ids": topk}

        def cell(matrix, pid):
            return float(matrix.raw[row, pid]) if not matrix.failed[row, pid] else float("nan")

        fold["meta_top1"] = {
            "auc_roc": cell(avg_roc, top1),
            "auc_pr": cell(avg_pr, top1),
        }

        # top-k ensemble: retrain the selected pipelines per repeat seed
        ens_roc, ens_pr = [], []
        for rep in result.seeds:
            seed = cell_seed(master_seed, fold_name, n_a, rep)
            view = make_weak_view(ds, n_a, seed)
            dets = []
            for pid in topk:
                try:
                    dets.append(train_pipeline(view, space.configs[pid], seed))
                except AdforgeError:
                    continue
            if not dets:
                continue
            scores = ensemble_scores(dets, view.test_X)
            ens_roc.append(auc_roc(scores, view.test_y))
            ens_pr.append(auc_pr(scores, view.test_y))
        fold["meta_topk"] = {
            "auc_roc": float(np.mean(ens_roc)) if ens_roc else float("nan"),
            "auc_pr": float(np.mean(ens_pr)) if ens_pr else float("nan"),
        }

        # RS: one uniform draw per repeat, read off the per-seed matrices
        rs_roc, rs_pr = [], []
        for rep in result.seeds:
            rs_id = random_select(space, derive_seed(master_seed, "rs", fold_name, n_a, rep))
            mat_roc = result.per_seed[("auc_roc", n_a, rep)]
            mat_pr = result.per_seed[("auc_pr", n_a, rep)]
            rs_roc.append(cell(mat_roc, rs_id))
            rs_pr.append(cell(mat_pr, rs_id))
        fold["rs"] = {
            "auc_roc": float(np.nanmean(rs_roc)),
            "auc_pr": float(np.nanmean(rs_pr)),
        }

        # SS: supervised selection on the revealed labels, per repeat
        ss_roc, ss_pr = [], []
        for rep in result.seeds:
            seed = cell_seed(master_seed, fold_name, n_a, rep)
            view = make_weak_view(ds, n_a, seed)
            try:
                ss_id = supervised_select(view, space, derive_seed(master_seed, "ss", fold_name, n_a, rep))
            except AdforgeError:
                continue
            mat_roc = result.per_seed[("auc_roc", n_a, rep)]
            mat_pr = result.per_seed[("auc_pr", n_a, rep)]
            ss_roc.append(cell(mat_roc, ss_id))
            ss_pr.append(cell(mat_pr, ss_id))
        fold["ss"] = {
            "auc_roc": float(np.nanmean(ss_roc)) if ss_roc else float("nan"),
            "auc_pr": float(np.nanmean(ss_pr)) if ss_pr else float("nan"),
        }

        gt_id = gt_select(avg_roc.raw[row], avg_roc.failed[row])
        fold["gt"] = {
            "auc_roc": cell(avg_roc, gt_id),
            "auc_pr": cell(avg_pr, gt_id),
        }
        fold["gt_id"] = gt_id
        report.folds.append(fold)

    if out_dir is not None:
        report.write(out_dir)
    return report
