from .augment import augment
from .dataset import Dataset, WeakView, load_dataset, make_weak_view, save_dataset
from .perturb import flip_train_labels, perturb
from .preprocess import PreprocessParams, apply_preprocess, fit_preprocess, preprocess
from .synth import DiagGMM, SynthConfig, fit_diag_gmm, sample_normal_base, synthesize

__all__ = [
    "Dataset",
    "WeakView",
    "load_dataset",
    "save_dataset",
    "make_weak_view",
    "augment",
    "preprocess",
    "fit_preprocess",
    "apply_preprocess",
    "PreprocessParams",
    "SynthConfig",
    "DiagGMM",
    "fit_diag_gmm",
    "sample_normal_base",
    "synthesize",
    "perturb",
    "flip_train_labels",
]
