from .lodo import LodoReport, run_lodo, train_fold_predictor
from .predictor import (
    MetaPredictor,
    NeuralRegressor,
    predict_pipeline_ranks,
    train_meta_predictor,
)
from .select import (
    baseline_select,
    ensemble_scores,
    gt_select,
    random_select,
    refine_space,
    select_pipelines,
    supervised_select,
)
from ..metrics import PerformanceMatrix
from .table import MetaTable, assemble_meta_table

__all__ = [
    "MetaTable",
    "PerformanceMatrix",
    "assemble_meta_table",
    "MetaPredictor",
    "NeuralRegressor",
    "train_meta_predictor",
    "predict_pipeline_ranks",
    "select_pipelines",
    "ensemble_scores",
    "baseline_select",
    "random_select",
    "supervised_select",
    "gt_select",
    "refine_space",
    "run_lodo",
    "train_fold_predictor",
    "LodoReport",
]
