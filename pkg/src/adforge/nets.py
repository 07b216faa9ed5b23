"""The four tabular detector architectures over the autodiff engine.

Every net maps a (batch, d) matrix to one raw anomaly score per row
(higher = more anomalous). Probabilistic losses apply sigmoid inside the
loss, so the network contract is identical across losses.
"""

from __future__ import annotations

import numpy as np

from . import engine as eg
from .engine import Value
from .errors import ConfigurationError, ContractError
from .optim import Optimizer
from .seeds import rng_for
from .space import PipelineConfig

TOKEN_DIM = 16
N_HEADS = 2
HEAD_DIM = TOKEN_DIM // N_HEADS
FF_DIM = 2 * TOKEN_DIM

INIT_KINDS = ("default", "xavier_normal", "kaiming_normal", "pretrained")

_ACT = {"tanh": eg.tanh, "relu": eg.relu, "leakyrelu": eg.leaky_relu}


def _linear(rng: np.random.Generator, fan_in: int, fan_out: int, name: str) -> tuple[Value, Value]:
    bound = 1.0 / np.sqrt(fan_in)
    w = Value(rng.uniform(-bound, bound, size=(fan_in, fan_out)), name=f"{name}.W")
    b = Value(rng.uniform(-bound, bound, size=(1, fan_out)), name=f"{name}.b")
    return w, b


class DetectorNet:
    """Base class: parameter registry plus the scoring contract."""

    architecture = "base"

    def __init__(self, d: int, cfg: PipelineConfig):
        self.d = d
        self.cfg = cfg
        self.act = _ACT[cfg.activation]
        self.dropout_rate = cfg.dropout
        self.params: list[Value] = []
        self._linears: list[tuple[Value, Value]] = []  # affine pairs, for re-init

    def _register_linear(self, rng, fan_in: int, fan_out: int, name: str) -> tuple[Value, Value]:
        w, b = _linear(rng, fan_in, fan_out, name)
        self.params += [w, b]
        self._linears.append((w, b))
        return w, b

    def _register(self, value: Value) -> Value:
        self.params.append(value)
        return value

    @property
    def param_count(self) -> int:
        return sum(p.data.size for p in self.params)

    def forward(self, X, train: bool = False, rng: np.random.Generator | None = None) -> Value:
        raise NotImplementedError

    def score(self, X: np.ndarray) -> np.ndarray:
        """Eval-mode scores as a 1-D array."""
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self.d:
            raise ContractError(f"expected (n, {self.d}) input, got {X.shape}")
        return self.forward(X, train=False).data.reshape(-1)

    # reconstruction pre-training hooks
    def encode(self, X, train: bool = False, rng=None) -> Value:
        raise NotImplementedError

    def encoder_params(self) -> list[Value]:
        raise NotImplementedError

    def encoder_width(self) -> int:
        raise NotImplementedError

    def state_dict(self) -> dict:
        return {
            p.name: {"shape": list(p.data.shape), "data": p.data.reshape(-1).tolist()}
            for p in self.params
        }

    def load_state(self, state: dict) -> None:
        for p in self.params:
            entry = state[p.name]
            p.data = np.asarray(entry["data"], dtype=np.float64).reshape(entry["shape"])


class MLPNet(DetectorNet):
    architecture = "mlp"

    def __init__(self, d: int, cfg: PipelineConfig, rng: np.random.Generator):
        super().__init__(d, cfg)
        self.hidden = []
        prev = d
        for i, h in enumerate(cfg.hidden_layers):
            self.hidden.append(self._register_linear(rng, prev, h, f"mlp.h{i}"))
            prev = h
        self.head = self._register_linear(rng, prev, 1, "mlp.head")

    def encode(self, X, train: bool = False, rng=None) -> Value:
        h = eg.as_value(X)
        for w, b in self.hidden:
            h = self.act(eg.affine(h, w, b))
            h = eg.dropout(h, self.dropout_rate, rng, train)
        return h

    def forward(self, X, train: bool = False, rng=None) -> Value:
        return eg.affine(self.encode(X, train, rng), *self.head)

    def encoder_params(self) -> list[Value]:
        return [p for pair in self.hidden for p in pair]

    def encoder_width(self) -> int:
        return self.cfg.hidden_layers[-1]


class AutoencoderNet(DetectorNet):
    """Encoder + mirrored decoder; the score head reads the bottleneck
    concatenated with the per-row reconstruction error."""

    architecture = "autoencoder"

    def __init__(self, d: int, cfg: PipelineConfig, rng: np.random.Generator):
        super().__init__(d, cfg)
        sizes = list(cfg.hidden_layers)
        self.enc = []
        prev = d
        for i, h in enumerate(sizes):
            self.enc.append(self._register_linear(rng, prev, h, f"ae.enc{i}"))
            prev = h
        self.dec = []
        mirror = list(reversed(sizes[:-1])) + [d]
        for i, h in enumerate(mirror):
            self.dec.append(self._register_linear(rng, prev, h, f"ae.dec{i}"))
            prev = h
        self.head = self._register_linear(rng, sizes[-1] + 1, 1, "ae.head")

    def encode(self, X, train: bool = False, rng=None) -> Value:
        h = eg.as_value(X)
        for w, b in self.enc:
            h = self.act(eg.affine(h, w, b))
            h = eg.dropout(h, self.dropout_rate, rng, train)
        return h

    def reconstruct(self, z: Value, train: bool = False, rng=None) -> Value:
        h = z
        for w, b in self.dec[:-1]:
            h = self.act(eg.affine(h, w, b))
            h = eg.dropout(h, self.dropout_rate, rng, train)
        return eg.affine(h, *self.dec[-1])

    def forward(self, X, train: bool = False, rng=None) -> Value:
        x = eg.as_value(X)
        z = self.encode(x, train, rng)
        x_hat = self.reconstruct(z, train, rng)
        diff = x_hat - x
        rec_err = eg.vmean(eg.mul(diff, diff), axis=1, keepdims=True)
        return eg.affine(eg.concat([z, rec_err], axis=1), *self.head)

    def encoder_params(self) -> list[Value]:
        return [p for pair in self.enc for p in pair]

    def decoder_params(self) -> list[Value]:
        return [p for pair in self.dec for p in pair]

    def encoder_width(self) -> int:
        return self.cfg.hidden_layers[-1]


class ResNetNet(DetectorNet):
    """Residual blocks (affine -> activation -> dropout, identity skip) with
    projection skips where widths change, then a linear head."""

    architecture = "resnet"

    def __init__(self, d: int, cfg: PipelineConfig, rng: np.random.Generator):
        super().__init__(d, cfg)
        self.blocks = []
        prev = d
        for i, w in enumerate(cfg.hidden_layers):
            transform = self._register_linear(rng, prev, w, f"res.b{i}")
            proj = None if prev == w else self._register_linear(rng, prev, w, f"res.p{i}")
            self.blocks.append((transform, proj))
            prev = w
        self.head = self._register_linear(rng, prev, 1, "res.head")

    def encode(self, X, train: bool = False, rng=None) -> Value:
        h = eg.as_value(X)
        for (tw, tb), proj in self.blocks:
            t = eg.dropout(self.act(eg.affine(h, tw, tb)), self.dropout_rate, rng, train)
            skip = h if proj is None else eg.affine(h, *proj)
            h = skip + t
        return h

    def forward(self, X, train: bool = False, rng=None) -> Value:
        return eg.affine(self.encode(X, train, rng), *self.head)

    def encoder_params(self) -> list[Value]:
        out = []
        for (tw, tb), proj in self.blocks:
            out += [tw, tb]
            if proj is not None:
                out += list(proj)
        return out

    def encoder_width(self) -> int:
        return self.cfg.hidden_layers[-1]


class FTTransformerNet(DetectorNet):
    """Per-feature learned tokens + CLS, one pre-norm transformer block
    (2-head attention, 2x feed-forward), linear head on the CLS output."""

    architecture = "fttransformer"

    def __init__(self, d: int, cfg: PipelineConfig, rng: np.random.Generator):
        super().__init__(d, cfg)
        scale = 1.0 / np.sqrt(TOKEN_DIM)
        self.tok_w = self._register(
            Value(rng.uniform(-scale, scale, size=(d, TOKEN_DIM)), name="ftt.tok_w")
        )
        self.tok_b = self._register(
            Value(rng.uniform(-scale, scale, size=(d, TOKEN_DIM)), name="ftt.tok_b")
        )
        self.cls = self._register(
            Value(rng.uniform(-scale, scale, size=(1, TOKEN_DIM)), name="ftt.cls")
        )
        self.ln1_g = self._register(Value(np.ones((1, TOKEN_DIM)), name="ftt.ln1_g"))
        self.ln1_b = self._register(Value(np.zeros((1, TOKEN_DIM)), name="ftt.ln1_b"))
        self.ln2_g = self._register(Value(np.ones((1, TOKEN_DIM)), name="ftt.ln2_g"))
        self.ln2_b = self._register(Value(np.zeros((1, TOKEN_DIM)), name="ftt.ln2_b"))
        # one fused q/k/v projection, split into heads along the last axis
        self.wqkv = self._register_linear(rng, TOKEN_DIM, 3 * TOKEN_DIM, "ftt.qkv")
        self.wo = self._register_linear(rng, TOKEN_DIM, TOKEN_DIM, "ftt.out")
        self.ff1 = self._register_linear(rng, TOKEN_DIM, FF_DIM, "ftt.ff1")
        self.ff2 = self._register_linear(rng, FF_DIM, TOKEN_DIM, "ftt.ff2")
        self.head = self._register_linear(rng, TOKEN_DIM, 1, "ftt.head")

    def encode(self, X, train: bool = False, rng=None) -> Value:
        x = eg.as_value(X)
        b, d = x.data.shape
        n_tok = d + 1
        x3 = eg.reshape(x, (b, d, 1))
        tok = eg.add(
            eg.mul(x3, eg.reshape(self.tok_w, (1, d, TOKEN_DIM))),
            eg.reshape(self.tok_b, (1, d, TOKEN_DIM)),
        )
        cls = eg.mul(eg.reshape(self.cls, (1, 1, TOKEN_DIM)), np.ones((b, 1, 1)))
        t = eg.concat([cls, tok], axis=1)

        # per-token affines run on the flattened (b*tokens, dim) matrix
        t_flat = eg.reshape(t, (b * n_tok, TOKEN_DIM))
        u = eg.layer_norm(t_flat, self.ln1_g, self.ln1_b)
        qkv = eg.reshape(eg.affine(u, *self.wqkv), (b, n_tok, 3 * TOKEN_DIM))
        heads = []
        for h in range(N_HEADS):
            lo = h * HEAD_DIM
            q = eg.slice_last(qkv, lo, lo + HEAD_DIM)
            k = eg.slice_last(qkv, TOKEN_DIM + lo, TOKEN_DIM + lo + HEAD_DIM)
            v = eg.slice_last(qkv, 2 * TOKEN_DIM + lo, 2 * TOKEN_DIM + lo + HEAD_DIM)
            scores = eg.mul(
                eg.matmul(q, eg.transpose_last2(k)), 1.0 / np.sqrt(HEAD_DIM)
            )
            heads.append(eg.matmul(eg.softmax_last(scores), v))
        attn = eg.affine(eg.reshape(eg.concat(heads, axis=2), (b * n_tok, TOKEN_DIM)), *self.wo)
        t_flat = eg.reshape(t, (b * n_tok, TOKEN_DIM)) + eg.dropout(attn, self.dropout_rate, rng, train)

        u2 = eg.layer_norm(t_flat, self.ln2_g, self.ln2_b)
        ff = eg.affine(self.act(eg.affine(u2, *self.ff1)), *self.ff2)
        t_flat = t_flat + eg.dropout(ff, self.dropout_rate, rng, train)
        return eg.take_token(eg.reshape(t_flat, (b, n_tok, TOKEN_DIM)), 0)

    def forward(self, X, train: bool = False, rng=None) -> Value:
        return eg.affine(self.encode(X, train, rng), *self.head)

    def encoder_params(self) -> list[Value]:
        return [p for p in self.params if not p.name.startswith("ftt.head")]

    def encoder_width(self) -> int:
        return TOKEN_DIM


_ARCH = {
    "mlp": MLPNet,
    "autoencoder": AutoencoderNet,
    "resnet": ResNetNet,
    "fttransformer": FTTransformerNet,
}


def build_network(d: int, cfg: PipelineConfig, seed: int) -> DetectorNet:
    """Construct the configured architecture with default-initialised parameters."""
    if d < 1:
        raise ConfigurationError("input dimension must be >= 1")
    rng = rng_for(seed, "build", cfg.architecture)
    net = _ARCH[cfg.architecture](d, cfg, rng)
    if cfg.initialization in ("xavier_normal", "kaiming_normal"):
        init_params(net, cfg.initialization, seed)
    return net


def init_params(net: DetectorNet, kind: str, seed: int) -> None:
    """Re-draw affine weights per the chosen scheme; biases become zero except
    under 'default'. 'pretrained' keeps default init (see pretrain_encoder)."""
    if kind not in INIT_KINDS:
        raise ConfigurationError(f"unknown initialization kind {kind!r}")
    if kind == "pretrained":
        return
    rng = rng_for(seed, "init", kind)
    for w, b in net._linears:
        fan_in, fan_out = w.data.shape
        if kind == "default":
            bound = 1.0 / np.sqrt(fan_in)
            w.data = rng.uniform(-bound, bound, size=w.data.shape)
            b.data = rng.uniform(-bound, bound, size=b.data.shape)
        elif kind == "xavier_normal":
            std = np.sqrt(2.0 / (fan_in + fan_out))
            w.data = rng.normal(0.0, std, size=w.data.shape)
            b.data = np.zeros_like(b.data)
        else:  # kaiming_normal
            std = np.sqrt(2.0 / fan_in)
            w.data = rng.normal(0.0, std, size=w.data.shape)
            b.data = np.zeros_like(b.data)


def pretrain_encoder(
    net: DetectorNet, X_train: np.ndarray, epochs: int, seed: int
) -> list[float]:
    """Train the net's encoder plus a mirrored decoder on reconstruction MSE
    (all train rows), then leave the tuned encoder weights in place.

    Returns the per-epoch reconstruction loss history (entry 0 is the loss
    before any update).
    """
    X_train = np.asarray(X_train, dtype=np.float64)
    n, d = X_train.shape
    rng = rng_for(seed, "pretrain")

    if isinstance(net, AutoencoderNet):
        dec_pairs = net.dec
        dec_params = net.decoder_params()
    else:
        # fresh mirrored decoder, discarded after pre-training
        sizes = (
            [TOKEN_DIM]
            if isinstance(net, FTTransformerNet)
            else list(net.cfg.hidden_layers)
        )
        mirror = list(reversed(sizes[:-1])) + [d]
        dec_pairs = []
        prev = net.encoder_width()
        for i, h in enumerate(mirror):
            dec_pairs.append(_linear(rng, prev, h, f"pretrain.dec{i}"))
            prev = h
        dec_params = [p for pair in dec_pairs for p in pair]

    def reconstruct(xv: Value) -> Value:
        z = net.encode(xv, train=False)
        h = z
        for w, b in dec_pairs[:-1]:
            h = net.act(eg.affine(h, w, b))
        x_hat = eg.affine(h, *dec_pairs[-1])
        diff = x_hat - xv
        return eg.vmean(eg.mul(diff, diff))

    trainable = net.encoder_params() + dec_params
    opt = Optimizer("adam", learning_rate=1e-3)
    batch = min(128, n)
    steps = min(int(np.ceil(n / batch)), 20)
    history = [reconstruct(eg.as_value(X_train)).item()]
    for _ in range(epochs):
        for _ in range(steps):
            idx = rng.integers(0, n, size=batch)
            loss = reconstruct(eg.as_value(X_train[idx]))
            eg.backward(loss)
            opt.step(trainable)
        history.append(reconstruct(eg.as_value(X_train)).item())
    return history
