"""Loss functions, class-balanced batch resampling, and end-to-end training
of one pipeline configuration on one weakly-supervised view."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import engine as eg
from .data.augment import augment
from .data.dataset import WeakView
from .data.preprocess import PreprocessParams, apply_preprocess, fit_preprocess
from .engine import Value
from .errors import ContractError, NumericError
from .nets import DetectorNet, build_network, pretrain_encoder
from .optim import Optimizer
from .seeds import derive_seed, rng_for
from .space import PipelineConfig

LOSS_KINDS = ("bce", "focal", "minus", "inverse", "hinge", "deviation")
MAX_STEPS_PER_EPOCH = 20  # bounds the per-pipeline training budget

# counts every detector training; lets tests assert the zero-shot guarantee
TRAIN_CALLS = 0


@dataclass
class LossParams:
    hinge_margin: float = 1.0
    minus_margin: float = 1.0
    deviation_margin: float = 5.0
    deviation_draws: int = 5000
    focal_gamma: float = 2.0
    focal_alpha: float = 0.25
    inverse_eps: float = 1e-6


@dataclass
class TrainPool:
    """Preprocessed train rows split by annotation."""

    X_unlabeled: np.ndarray
    X_labeled: np.ndarray

    @property
    def size(self) -> int:
        return len(self.X_unlabeled) + len(self.X_labeled)


def resample_batch(
    pool: TrainPool | WeakView,
    batch_size: int,
    rng: np.random.Generator,
    uniform: bool = False,
) -> tuple[np.ndarray, np.ndarray]:
    """Half unlabeled (label 0), half labeled anomalies (label 1), drawn with
    replacement; ``uniform=True`` (inverse loss) samples the union instead."""
    if isinstance(pool, WeakView):
        pool = TrainPool(pool.unlabeled_X, pool.labeled_X)
    if batch_size % 2 != 0:
        raise ContractError("batch_size must be even")
    if len(pool.X_labeled) == 0:
        raise ContractError("resample_batch needs a non-empty labeled pool")
    if uniform:
        X = np.vstack([pool.X_unlabeled, pool.X_labeled])
        y = np.r_[np.zeros(len(pool.X_unlabeled)), np.ones(len(pool.X_labeled))]
        picks = rng.integers(0, len(X), size=batch_size)
        return X[picks], y[picks]
    half = batch_size // 2
    iu = rng.integers(0, len(pool.X_unlabeled), size=half)
    il = rng.integers(0, len(pool.X_labeled), size=half)
    X = np.vstack([pool.X_unlabeled[iu], pool.X_labeled[il]])
    y = np.r_[np.zeros(half), np.ones(half)]
    return X, y


def _class_mean(per_sample: Value, mask: np.ndarray) -> Value:
    """Mean of a (b,1) column over a class; an empty class contributes 0."""
    count = float(mask.sum())
    if count == 0.0:
        return Value(0.0)
    return eg.mul(eg.vsum(eg.mul(per_sample, mask.reshape(-1, 1))), 1.0 / count)


def compute_loss(
    kind: str,
    scores: Value,
    labels: np.ndarray,
    params: LossParams | None = None,
    rng: np.random.Generator | None = None,
) -> Value:
    """Mean-reduced scalar loss on raw scores; labels are 0/1."""
    params = params or LossParams()
    y = np.asarray(labels, dtype=np.float64).reshape(-1, 1)
    if scores.data.shape != y.shape:
        raise ContractError(f"scores {scores.data.shape} vs labels {y.shape}")
    is_anom = y.reshape(-1) == 1.0
    is_norm = ~is_anom

    if kind == "bce":
        per = eg.softplus(scores) - eg.mul(scores, y)
        return eg.vmean(per)
    if kind == "focal":
        p = eg.sigmoid(scores)
        pos = eg.mul(
            eg.mul(eg.pow_const(1.0 - p, params.focal_gamma), eg.softplus(-scores)),
            params.focal_alpha,
        )
        neg = eg.mul(
            eg.mul(eg.pow_const(p, params.focal_gamma), eg.softplus(scores)),
            1.0 - params.focal_alpha,
        )
        return eg.vmean(eg.mul(pos, y) + eg.mul(neg, 1.0 - y))
    if kind == "minus":
        # normals pushed down; anomaly term hinged at the margin so it is
        # bounded below by 0 and the update saturates
        anom = eg.relu(params.minus_margin - scores)
        return _class_mean(scores, is_norm) + _class_mean(anom, is_anom)
    if kind == "inverse":
        s_pos = eg.softplus(scores)
        inv = eg.pow_const(s_pos + params.inverse_eps, -1.0)
        return _class_mean(s_pos, is_norm) + _class_mean(inv, is_anom)
    if kind == "hinge":
        return _class_mean(eg.relu(scores), is_norm) + _class_mean(
            eg.relu(params.hinge_margin - scores), is_anom
        )
    if kind == "deviation":
        if rng is None:
            rng = np.random.default_rng(0)
        ref = rng.standard_normal(params.deviation_draws)
        mu_r, sigma_r = float(ref.mean()), float(ref.std())
        if sigma_r < 1e-12:
            raise NumericError("deviation reference draws have zero spread")
        dev = eg.mul(scores - mu_r, 1.0 / sigma_r)
        per = eg.mul(eg.absolute(dev), 1.0 - y) + eg.mul(
            eg.relu(params.deviation_margin - dev), y
        )
        return eg.vmean(per)
    raise ContractError(f"unknown loss kind {kind!r}")


@dataclass
class TrainedDetector:
    net: DetectorNet
    preprocess_params: PreprocessParams
    config: PipelineConfig
    history: list[float] = field(default_factory=list)
    seed: int = 0

    def to_dict(self) -> dict:
        return {
            "architecture": self.net.architecture,
            "input_dim": self.net.d,
            "config": self.config.to_dict(),
            "preprocess": self.preprocess_params.to_dict(),
            "history": self.history,
            "seed": self.seed,
            "state": self.net.state_dict(),
        }


def score_samples(det: TrainedDetector, X: np.ndarray) -> np.ndarray:
    """Eval-mode anomaly scores (higher = more anomalous) for raw-feature rows."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != det.net.d:
        raise ContractError(f"expected (n, {det.net.d}) input, got {X.shape}")
    Xp = apply_preprocess(det.preprocess_params, X, clip=True)
    return det.net.score(Xp)


def train_pipeline(view: WeakView, cfg: PipelineConfig, seed: int) -> TrainedDetector:
    """augment -> preprocess -> build/init (pretrain if configured) -> train loop."""
    global TRAIN_CALLS
    TRAIN_CALLS += 1

    aug_view = augment(view, cfg.augmentation, derive_seed(seed, "augment"))
    X_train, _ = aug_view.train_matrix()
    pp = fit_preprocess(X_train, cfg.preprocessing)
    pool = TrainPool(
        apply_preprocess(pp, aug_view.unlabeled_X),
        apply_preprocess(pp, aug_view.labeled_X),
    )
    d = X_train.shape[1]
    net = build_network(d, cfg, derive_seed(seed, "net"))
    if cfg.initialization == "pretrained":
        pretrain_encoder(
            net,
            np.vstack([pool.X_unlabeled, pool.X_labeled]),
            cfg.epochs,
            derive_seed(seed, "pretrain"),
        )

    opt = Optimizer(cfg.optimizer, cfg.learning_rate, cfg.weight_decay)
    loss_params = LossParams()
    batch_rng = rng_for(seed, "batches")
    drop_rng = rng_for(seed, "dropout")
    dev_rng = rng_for(seed, "deviation")
    steps = min(int(np.ceil(pool.size / cfg.batch_size)), MAX_STEPS_PER_EPOCH)
    uniform = cfg.loss == "inverse"

    history: list[float] = []
    for _ in range(cfg.epochs):
        epoch_losses = []
        for _ in range(steps):
            Xb, yb = resample_batch(pool, cfg.batch_size, batch_rng, uniform=uniform)
            scores = net.forward(Xb, train=True, rng=drop_rng)
            loss = compute_loss(cfg.loss, scores, yb, loss_params, dev_rng)
            eg.backward(loss)  # resets and repopulates grads of the step's graph
            opt.step(net.params)
            epoch_losses.append(loss.item())
        history.append(float(np.mean(epoch_losses)))
    return TrainedDetector(net, pp, cfg, history, seed)
