"""Command-line entry point: synth / run / meta-train / select / report."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .bench import collect_results, load_config, run_from_config
from .data.dataset import load_dataset, save_dataset
from .data.synth import SynthConfig, sample_normal_base, synthesize
from .errors import AdforgeError
from .meta.predictor import MetaPredictor, predict_pipeline_ranks, train_meta_predictor
from .meta.select import select_pipelines
from .meta.table import assemble_meta_table
from .metafeat import meta_features
from .report import report as make_report
from .seeds import derive_seed
from .space import DesignSpace
from .store import ResultStore


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=42, help="master seed")
    p.add_argument("--workers", type=int, default=1, help="worker processes for benchmark cells")
    p.add_argument("--out", type=Path, default=Path("out"), help="output directory")


def cmd_synth(args) -> int:
    args.out.mkdir(parents=True, exist_ok=True)
    kinds = args.kinds.split(",")
    gen_seeds = [int(s) for s in args.gen_seeds.split(",")]
    written = []
    for kind in kinds:
        for gs in gen_seeds:
            base_seed = derive_seed(args.seed, "base", kind, gs)
            base = sample_normal_base(args.n_normals, args.dim, base_seed)
            cfg = SynthConfig(
                anomaly_kind=kind,
                anomaly_ratio=args.ratio,
                gmm_components=args.components,
                seed=derive_seed(args.seed, "inject", kind, gs),
            )
            ds = synthesize(base, cfg, name=f"{kind}_{gs}")
            path = args.out / f"{ds.name}.csv"
            save_dataset(ds, path)
            written.append(path)
            print(f"wrote {path} ({ds.n_samples} rows, {ds.n_anomalies} anomalies)")
    return 0


def cmd_run(args) -> int:
    config = load_config(args.config)
    store, _ = run_from_config(config, args.out, args.seed, workers=args.workers)
    print(f"{len(store)} records in {store.path}")
    return 0


def cmd_meta_train(args) -> int:
    config = load_config(args.results / "config.json") if (args.results / "config.json").exists() else None
    store = ResultStore(args.results)
    if len(store) == 0:
        print("no records found; run the benchmark first", file=sys.stderr)
        return 2
    space = DesignSpace.load(args.results / "space.json")
    records = store.records()
    names = sorted({r.dataset for r in records})
    n_a_values = sorted({r.n_a for r in records})
    seeds = sorted({r.seed for r in records})
    if config is not None:
        datasets = [load_dataset(p) for p in config["datasets"]]
    else:
        datasets = [load_dataset(p) for p in args.datasets]
        if sorted(d.name for d in datasets) != names:
            print("provided datasets do not match the store", file=sys.stderr)
            return 2
    result = collect_results(store, datasets, space, n_a_values, seeds, args.seed, args.results)
    table = assemble_meta_table(
        {n_a: result.matrices[(args.metric, n_a)] for n_a in n_a_values},
        result.metafeats,
        space,
    )
    predictor = train_meta_predictor(table, args.backend, args.loss, derive_seed(args.seed, "meta"))
    args.out.mkdir(parents=True, exist_ok=True)
    model_path = args.out / "meta_model.json"
    predictor.save(model_path)
    (args.out / "meta_space.json").write_text(space.to_json(), encoding="utf-8")
    print(f"wrote {model_path}")
    return 0


def cmd_select(args) -> int:
    predictor = MetaPredictor.load(args.model)
    space = DesignSpace.load(args.space)
    ds = load_dataset(args.data)
    feats = meta_features(ds.X, derive_seed(args.seed, ds.name, "metafeat"))
    ranks = predict_pipeline_ranks(predictor, feats, args.n_a, space)
    picked = select_pipelines(ranks, args.k)
    payload = {
        "dataset": ds.name,
        "n_a": args.n_a,
        "selected": [
            {
                "pipeline_id": pid,
                "predicted_rank": float(ranks[pid]),
                "config": space.configs[pid].to_dict(),
            }
            for pid in picked
        ],
    }
    args.out.mkdir(parents=True, exist_ok=True)
    out_path = args.out / f"selection_{ds.name}.json"
    out_path.write_text(json.dumps(payload, indent=2), encoding="utf-8")
    print(json.dumps(payload, indent=2))
    return 0


def cmd_report(args) -> int:
    written = make_report(args.results, args.kind, args.out)
    for path in written:
        print(f"wrote {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="adforge",
        description="Benchmark anomaly-detection design choices and select pipelines zero-shot.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate synthetic anomaly datasets as CSVs")
    _add_common(p)
    p.add_argument("--kinds", default="local,global,cluster,dependency")
    p.add_argument("--gen-seeds", default="0,1", help="comma-separated generator seeds")
    p.add_argument("--n-normals", type=int, default=300)
    p.add_argument("--dim", type=int, default=6)
    p.add_argument("--ratio", type=float, default=0.08)
    p.add_argument("--components", type=int, default=2)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("run", help="fill the benchmark grid from a JSON config")
    _add_common(p)
    p.add_argument("--config", type=Path, required=True)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("meta-train", help="train a meta-predictor from benchmark results")
    _add_common(p)
    p.add_argument("--results", type=Path, required=True)
    p.add_argument("--datasets", nargs="*", default=[], help="dataset CSVs (if no config.json)")
    p.add_argument("--backend", choices=("neural", "gbdt"), default="gbdt")
    p.add_argument("--loss", choices=("mse", "weighted_mse", "pearson", "ranknet"), default="mse")
    p.add_argument("--metric", choices=("auc_roc", "auc_pr"), default="auc_roc")
    p.set_defaults(func=cmd_meta_train)

    p = sub.add_parser("select", help="zero-shot pipeline selection for a new CSV")
    _add_common(p)
    p.add_argument("--model", type=Path, required=True)
    p.add_argument("--space", type=Path, required=True)
    p.add_argument("--data", type=Path, required=True)
    p.add_argument("--n-a", type=int, default=10)
    p.add_argument("--k", type=int, default=5)
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("report", help="emit CSV reports from stored records")
    _add_common(p)
    p.add_argument("--results", type=Path, required=True)
    p.add_argument("--kind", choices=("long", "per_pipeline", "per_choice", "all"), default="all")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except AdforgeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
