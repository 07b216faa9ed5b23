"""SGD / Adam / RMSprop with decoupled weight decay.

Weight decay is applied as ``p -= lr * wd * p`` before the gradient term for
all three rules, so the decay semantics do not depend on the optimizer choice.
"""

from __future__ import annotations

import numpy as np

from .engine import Value
from .errors import ConfigurationError, NumericError

ADAM_BETA1, ADAM_BETA2, ADAM_EPS = 0.9, 0.999, 1e-8
RMSPROP_RHO, RMSPROP_EPS = 0.99, 1e-8

KINDS = ("sgd", "adam", "rmsprop")


class Optimizer:
    def __init__(self, kind: str, learning_rate: float, weight_decay: float = 0.0):
        if kind not in KINDS:
            raise ConfigurationError(f"unknown optimizer kind {kind!r}")
        if learning_rate <= 0:
            raise ConfigurationError("learning_rate must be positive")
        if weight_decay < 0:
            raise ConfigurationError("weight_decay must be non-negative")
        self.kind = kind
        self.learning_rate = learning_rate
        self.weight_decay = weight_decay
        self.step_count = 0
        self._m: dict[int, np.ndarray] = {}
        self._v: dict[int, np.ndarray] = {}

    def step(self, params: list[Value]) -> None:
        """Apply one update using each parameter's current .grad."""
        self.step_count += 1
        lr, wd = self.learning_rate, self.weight_decay
        for p in params:
            g = p.grad
            if g is None or not np.all(np.isfinite(g)):
                raise NumericError(f"non-finite gradient for parameter {p.name or 'unnamed'}")
            if wd > 0.0:
                p.data -= lr * wd * p.data
            if self.kind == "sgd":
                p.data -= lr * g
            elif self.kind == "adam":
                key = id(p)
                m = self._m.setdefault(key, np.zeros_like(p.data))
                v = self._v.setdefault(key, np.zeros_like(p.data))
                m *= ADAM_BETA1
                m += (1.0 - ADAM_BETA1) * g
                v *= ADAM_BETA2
                v += (1.0 - ADAM_BETA2) * (g * g)
                scale = lr / (1.0 - ADAM_BETA1**self.step_count)
                denom = np.sqrt(v / (1.0 - ADAM_BETA2**self.step_count))
                denom += ADAM_EPS
                p.data -= scale * m / denom
            else:  # rmsprop
                key = id(p)
                v = self._v.setdefault(key, np.zeros_like(p.data))
                v *= RMSPROP_RHO
                v += (1.0 - RMSPROP_RHO) * (g * g)
                p.data -= lr * g / (np.sqrt(v) + RMSPROP_EPS)


def optimizer_step(opt: Optimizer, params: list[Value]) -> None:
    opt.step(params)
