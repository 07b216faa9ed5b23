"""Meta-predictor backends: a two-hidden-layer MLP (four training losses) and
the in-package histogram GBDT (plain squared-error regression)."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .. import engine as eg
from ..engine import Value
from ..errors import ConfigurationError, ContractError
from ..gbdt import HistGBDT
from ..metafeat import META_SCHEMA_VERSION, MetaFeatureVector
from ..optim import Optimizer
from ..seeds import derive_seed, rng_for
from ..space import DesignSpace, encode_pipeline
from .table import MetaTable

BACKENDS = ("neural", "gbdt")
LOSS_KINDS = ("mse", "weighted_mse", "pearson", "ranknet")

HIDDEN = 128
EPOCHS = 100
BATCH = 512
LR = 1e-3
PATIENCE = 10
VAL_FRACTION = 0.1
WEIGHTED_MSE_ALPHA = 1.0
RANKNET_MAX_PAIRS = 50


class NeuralRegressor:
    def __init__(self, input_len: int, seed: int):
        rng = rng_for(seed, "meta_mlp")
        self.input_len = input_len
        self.layers: list[tuple[Value, Value]] = []
        prev = input_len
        for i, width in enumerate((HIDDEN, HIDDEN, 1)):
            bound = 1.0 / np.sqrt(prev)
            w = Value(rng.uniform(-bound, bound, (prev, width)), name=f"meta.l{i}.W")
            b = Value(rng.uniform(-bound, bound, (1, width)), name=f"meta.l{i}.b")
            self.layers.append((w, b))
            prev = width

    @property
    def params(self) -> list[Value]:
        return [p for pair in self.layers for p in pair]

    def forward(self, X: np.ndarray) -> Value:
        h = eg.as_value(X)
        for w, b in self.layers[:-1]:
            h = eg.relu(eg.affine(h, w, b))
        return eg.affine(h, *self.layers[-1])

    def predict(self, X: np.ndarray) -> np.ndarray:
        return self.forward(np.asarray(X, dtype=np.float64)).data.reshape(-1)

    def get_weights(self) -> list[np.ndarray]:
        return [p.data.copy() for p in self.params]

    def set_weights(self, weights: list[np.ndarray]) -> None:
        for p, w in zip(self.params, weights):
            p.data = w.copy()


def _neural_loss(
    model: NeuralRegressor,
    X: np.ndarray,
    t: np.ndarray,
    kind: str,
    rng: np.random.Generator | None,
) -> Value | None:
    """Loss on one batch; grouped losses expect the batch to be one dataset group."""
    pred = model.forward(X)
    tcol = t.reshape(-1, 1)
    if kind == "mse":
        diff = pred - tcol
        return eg.vmean(eg.mul(diff, diff))
    if kind == "weighted_mse":
        # emphasise both ends: true-top rows and rows currently predicted near the top
        w = 1.0 + WEIGHTED_MSE_ALPHA * (1.0 - tcol) + WEIGHTED_MSE_ALPHA * (1.0 - pred.data)
        diff = pred - tcol
        return eg.vmean(eg.mul(eg.mul(diff, diff), w))
    if kind == "pearson":
        if len(t) < 2 or t.std() < 1e-12:
            return None
        pc = pred - float(pred.data.mean())
        tc = tcol - t.mean()
        cov = eg.vsum(eg.mul(pc, tc))
        var_p = eg.vsum(eg.mul(pc, pc))
        var_t = float((tc**2).sum())
        rho = eg.mul(cov, eg.pow_const(eg.mul(var_p, var_t) + 1e-12, -0.5))
        return 1.0 - rho
    if kind == "ranknet":
        n = len(t)
        if n < 2:
            return None
        k = min(RANKNET_MAX_PAIRS, n * (n - 1))
        ii = rng.integers(0, n, size=2 * k)
        jj = rng.integers(0, n, size=2 * k)
        keep = ii != jj
        ii, jj = ii[keep][:k], jj[keep][:k]
        if len(ii) == 0:
            return None
        Si = np.zeros((len(ii), n))
        Sj = np.zeros((len(ii), n))
        Si[np.arange(len(ii)), ii] = 1.0
        Sj[np.arange(len(jj)), jj] = 1.0
        x = eg.matmul(Value(Sj), pred) - eg.matmul(Value(Si), pred)
        labels = (t[ii] < t[jj]).astype(np.float64).reshape(-1, 1)
        per = eg.softplus(x) - eg.mul(x, labels)
        return eg.vmean(per)
    raise ConfigurationError(f"unknown meta loss {kind!r}")


def _grouped_batches(
    groups: dict[str, np.ndarray], rng: np.random.Generator, batch: int
) -> list[np.ndarray]:
    """Single-dataset chunks of up to ``batch`` rows, shuffled each epoch."""
    order = sorted(groups)
    rng.shuffle(order)
    out = []
    for ds in order:
        idx = groups[ds][rng.permutation(len(groups[ds]))]
        for s in range(0, len(idx), batch):
            out.append(idx[s : s + batch])
    return out


def _row_batches(n: int, rng: np.random.Generator, batch: int) -> list[np.ndarray]:
    idx = rng.permutation(n)
    return [idx[s : s + batch] for s in range(0, n, batch)]


@dataclass
class MetaPredictor:
    backend: str
    loss_kind: str
    meta_mean: np.ndarray
    meta_std: np.ndarray
    input_len: int
    model: object
    schema_version: int = META_SCHEMA_VERSION

    def predict_rows(self, X: np.ndarray) -> np.ndarray:
        if X.shape[1] != self.input_len:
            raise ContractError(f"input length {X.shape[1]} != schema {self.input_len}")
        return np.asarray(self.model.predict(X), dtype=np.float64)

    def to_json(self) -> str:
        if self.backend == "gbdt":
            payload = self.model.to_dict()
        else:
            payload = {
                "input_len": self.model.input_len,
                "weights": [
                    {"shape": list(w.shape), "data": w.reshape(-1).tolist()}
                    for w in self.model.get_weights()
                ],
            }
        return json.dumps(
            {
                "schema_version": self.schema_version,
                "backend": self.backend,
                "loss_kind": self.loss_kind,
                "input_len": self.input_len,
                "meta_mean": self.meta_mean.tolist(),
                "meta_std": self.meta_std.tolist(),
                "model": payload,
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "MetaPredictor":
        d = json.loads(text)
        if d["schema_version"] != META_SCHEMA_VERSION:
            raise ContractError("meta-predictor schema version mismatch")
        if d["backend"] == "gbdt":
            model = HistGBDT.from_dict(d["model"])
        else:
            model = NeuralRegressor(d["model"]["input_len"], seed=0)
            model.set_weights(
                [
                    np.asarray(w["data"], dtype=np.float64).reshape(w["shape"])
                    for w in d["model"]["weights"]
                ]
            )
        return cls(
            backend=d["backend"],
            loss_kind=d["loss_kind"],
            meta_mean=np.asarray(d["meta_mean"]),
            meta_std=np.asarray(d["meta_std"]),
            input_len=d["input_len"],
            model=model,
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json(), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "MetaPredictor":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))


def train_meta_predictor(
    table: MetaTable, backend: str, loss_kind: str, seed: int
) -> MetaPredictor:
    if backend not in BACKENDS:
        raise ConfigurationError(f"unknown backend {backend!r}")
    if loss_kind not in LOSS_KINDS:
        raise ConfigurationError(f"unknown meta loss {loss_kind!r}")
    if table.n_rows == 0:
        raise ContractError("meta table is empty")
    X = table.inputs()
    t = table.target

    if backend == "gbdt":
        if loss_kind != "mse":
            raise ConfigurationError("the tree backend supports plain mse regression only")
        model = HistGBDT().fit(X, t)
        return MetaPredictor(
            backend, loss_kind, table.meta_mean, table.meta_std, X.shape[1], model
        )

    rng = rng_for(seed, "meta_train")
    model = NeuralRegressor(X.shape[1], derive_seed(seed, "meta_init"))
    opt = Optimizer("adam", LR)
    n = len(t)
    val_n = max(1, int(round(VAL_FRACTION * n)))
    perm = rng.permutation(n)
    val_idx, train_idx = perm[:val_n], perm[val_n:]
    grouped = loss_kind in ("pearson", "ranknet")
    groups_all = table.groups()
    train_groups = {
        ds: idx[np.isin(idx, train_idx)] for ds, idx in groups_all.items()
    }
    train_groups = {ds: idx for ds, idx in train_groups.items() if len(idx) >= 2}
    val_groups = {ds: idx[np.isin(idx, val_idx)] for ds, idx in groups_all.items()}
    val_groups = {ds: idx for ds, idx in val_groups.items() if len(idx) >= 2}

    def val_loss() -> float:
        if grouped:
            losses = []
            for ds in sorted(val_groups):
                idx = val_groups[ds]
                lv = _neural_loss(model, X[idx], t[idx], loss_kind, rng_for(seed, "val", ds))
                if lv is not None:
                    losses.append(lv.item())
            return float(np.mean(losses)) if losses else float("inf")
        lv = _neural_loss(model, X[val_idx], t[val_idx], loss_kind, None)
        return lv.item()

    best = (float("inf"), model.get_weights())
    stale = 0
    for _ in range(EPOCHS):
        if grouped:
            batches = _grouped_batches(train_groups, rng, BATCH)
        else:
            batches = [train_idx[b] for b in _row_batches(len(train_idx), rng, BATCH)]
        for bidx in batches:
            loss = _neural_loss(model, X[bidx], t[bidx], loss_kind, rng)
            if loss is None:
                continue
            eg.backward(loss)
            opt.step(model.params)
        vl = val_loss()
        if vl < best[0] - 1e-9:
            best = (vl, model.get_weights())
            stale = 0
        else:
            stale += 1
            if stale >= PATIENCE:
                break
    model.set_weights(best[1])
    return MetaPredictor(backend, loss_kind, table.meta_mean, table.meta_std, X.shape[1], model)


def predict_pipeline_ranks(
    predictor: MetaPredictor,
    meta_vec: MetaFeatureVector,
    n_a: int,
    space: DesignSpace,
) -> np.ndarray:
    """Predicted normalized rank per pipeline; trains no detector."""
    if meta_vec.schema_version != predictor.schema_version:
        raise ContractError("meta-feature schema version mismatch")
    meta_std = (meta_vec.values - predictor.meta_mean) / predictor.meta_std
    comp = np.stack([encode_pipeline(c) for c in space.configs]).astype(np.float64)
    rows = np.hstack(
        [
            np.tile(meta_std, (space.m_pipelines, 1)),
            np.full((space.m_pipelines, 1), float(n_a)),
            comp,
        ]
    )
    return predictor.predict_rows(rows)
