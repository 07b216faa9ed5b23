"""Minimal reverse-mode autodiff over dense float64 arrays.

Values are batch-first matrices (rows = samples); a handful of 3-D batched
primitives exist solely for the attention path of the transformer detector.
Gradients are exact partial derivatives, checked against central finite
differences in the test suite.

Gradient buffers are allocated lazily: a node's .grad is None until a
backward pass (or zero_grads) touches it.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from .errors import ContractError, DimensionError

LOG_CLAMP = 1e-12

_ACT_KIND = {
    "tanh": _kernels.TANH,
    "relu": _kernels.RELU,
    "leakyrelu": _kernels.LEAKY_RELU,
    "sigmoid": _kernels.SIGMOID,
}


class Value:
    """A node in the computation graph: forward data plus gradient buffer."""

    __slots__ = ("data", "grad", "op", "parents", "_backward", "name")

    def __init__(self, data, parents: tuple = (), op: str = "leaf", name: str | None = None):
        self.data = np.asarray(data, dtype=np.float64)
        if self.data.ndim == 0:
            self.data = self.data.reshape(1, 1)
        elif self.data.ndim == 1:
            self.data = self.data.reshape(1, -1)
        self.grad = None
        self.op = op
        self.parents = parents
        self._backward = None
        self.name = name

    @property
    def shape(self):
        return self.data.shape

    def item(self) -> float:
        return float(self.data.reshape(-1)[0])

    def __repr__(self):
        tag = f" name={self.name}" if self.name else ""
        return f"Value(op={self.op}, shape={self.data.shape}{tag})"

    # operator sugar; constants are wrapped as leaf Values
    def __add__(self, other):
        return add(self, other)

    def __radd__(self, other):
        return add(other, self)

    def __sub__(self, other):
        return add(self, mul(other, -1.0))

    def __rsub__(self, other):
        return add(other, mul(self, -1.0))

    def __mul__(self, other):
        return mul(self, other)

    def __rmul__(self, other):
        return mul(other, self)

    def __neg__(self):
        return mul(self, -1.0)

    def __truediv__(self, other):
        if isinstance(other, (int, float)):
            return mul(self, 1.0 / other)
        return mul(self, pow_const(other, -1.0))

    def __matmul__(self, other):
        return matmul(self, other)


def as_value(x) -> Value:
    return x if isinstance(x, Value) else Value(x)


def _acc(node: Value, delta: np.ndarray, own: bool = False) -> None:
    """Accumulate a gradient contribution. ``own=True`` promises the delta is a
    fresh writeable array that may be stored without copying; otherwise views
    and broadcast results are copied on first touch."""
    if node.grad is None:
        if own and delta.shape == node.data.shape:
            node.grad = delta
        else:
            node.grad = np.array(delta, dtype=np.float64)
            if node.grad.shape != node.data.shape:  # scalar delta for (1,1) nodes
                node.grad = np.broadcast_to(node.grad, node.data.shape).copy()
    else:
        node.grad += delta


def _unbroadcast(grad: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    """Sum a broadcast gradient back down to the original operand shape."""
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for ax, n in enumerate(shape):
        if n == 1 and grad.shape[ax] != 1:
            grad = grad.sum(axis=ax, keepdims=True)
    return grad


def add(a, b) -> Value:
    a, b = as_value(a), as_value(b)
    try:
        data = a.data + b.data
    except ValueError as exc:
        raise DimensionError(f"add: shapes {a.shape} and {b.shape} do not broadcast") from exc
    out = Value(data, (a, b), "add")

    def _bw():
        da = _unbroadcast(out.grad, a.data.shape)
        _acc(a, da, own=da is not out.grad)
        db = _unbroadcast(out.grad, b.data.shape)
        _acc(b, db, own=db is not out.grad)

    out._backward = _bw
    return out


def mul(a, b) -> Value:
    a, b = as_value(a), as_value(b)
    try:
        data = a.data * b.data
    except ValueError as exc:
        raise DimensionError(f"mul: shapes {a.shape} and {b.shape} do not broadcast") from exc
    out = Value(data, (a, b), "mul")

    def _bw():
        _acc(a, _unbroadcast(out.grad * b.data, a.data.shape), own=True)
        _acc(b, _unbroadcast(out.grad * a.data, b.data.shape), own=True)

    out._backward = _bw
    return out


def matmul(a, b) -> Value:
    """Matrix product; supports (2d,2d), (3d,2d) and (3d,3d) operands."""
    a, b = as_value(a), as_value(b)
    if a.data.shape[-1] != b.data.shape[-2 if b.data.ndim > 1 else 0]:
        raise DimensionError(f"matmul: inner dims of {a.shape} and {b.shape} differ")
    out = Value(np.matmul(a.data, b.data), (a, b), "matmul")

    def _bw():
        ga = np.matmul(out.grad, np.swapaxes(b.data, -1, -2))
        gb = np.matmul(np.swapaxes(a.data, -1, -2), out.grad)
        _acc(a, _unbroadcast(ga, a.data.shape), own=True)
        _acc(b, _unbroadcast(gb, b.data.shape), own=True)

    out._backward = _bw
    return out


def activation(kind: str, x, slope: float = 0.01) -> Value:
    x = as_value(x)
    code = _ACT_KIND[kind]
    out = Value(_kernels.act_forward(code, x.data, slope), (x,), kind)

    def _bw():
        _acc(x, _kernels.act_backward(code, x.data, out.data, out.grad, slope), own=True)

    out._backward = _bw
    return out


def tanh(x) -> Value:
    return activation("tanh", x)


def relu(x) -> Value:
    return activation("relu", x)


def leaky_relu(x, slope: float = 0.01) -> Value:
    return activation("leakyrelu", x, slope)


def sigmoid(x) -> Value:
    return activation("sigmoid", x)


def exp(x) -> Value:
    x = as_value(x)
    out = Value(np.exp(x.data), (x,), "exp")

    def _bw():
        _acc(x, out.grad * out.data, own=True)

    out._backward = _bw
    return out


def log(x) -> Value:
    """Natural log, input clamped at LOG_CLAMP so the op never sees <= 0."""
    x = as_value(x)
    clamped = np.maximum(x.data, LOG_CLAMP)
    out = Value(np.log(clamped), (x,), "log")

    def _bw():
        _acc(x, out.grad / clamped, own=True)

    out._backward = _bw
    return out


def softplus(x) -> Value:
    x = as_value(x)
    out = Value(np.logaddexp(0.0, x.data), (x,), "softplus")

    def _bw():
        _acc(x, out.grad * _kernels.act_forward(_kernels.SIGMOID, x.data), own=True)

    out._backward = _bw
    return out


def absolute(x) -> Value:
    x = as_value(x)
    out = Value(np.abs(x.data), (x,), "abs")

    def _bw():
        _acc(x, out.grad * np.sign(x.data), own=True)

    out._backward = _bw
    return out


def pow_const(x, p: float) -> Value:
    """x**p elementwise for a constant exponent; negative exponents clamp |x|."""
    x = as_value(x)
    base = x.data
    if p < 0:
        tiny = np.abs(base) < LOG_CLAMP
        if tiny.any():
            base = np.where(tiny, np.where(base < 0, -LOG_CLAMP, LOG_CLAMP), base)
    out = Value(np.power(base, p), (x,), "pow")

    def _bw():
        _acc(x, out.grad * p * np.power(base, p - 1.0), own=True)

    out._backward = _bw
    return out


def vsum(x, axis: int | None = None, keepdims: bool = False) -> Value:
    x = as_value(x)
    out = Value(np.sum(x.data, axis=axis, keepdims=keepdims), (x,), "sum")

    def _bw():
        g = out.grad
        if axis is not None and not keepdims:
            g = np.expand_dims(g, axis)
        _acc(x, np.broadcast_to(g, x.data.shape))

    out._backward = _bw
    return out


def vmean(x, axis: int | None = None, keepdims: bool = False) -> Value:
    x = as_value(x)
    n = x.data.size if axis is None else x.data.shape[axis]
    return mul(vsum(x, axis=axis, keepdims=keepdims), 1.0 / n)


def concat(vals: Sequence, axis: int = 1) -> Value:
    vals = [as_value(v) for v in vals]
    out = Value(np.concatenate([v.data for v in vals], axis=axis), tuple(vals), "concat")
    sizes = [v.data.shape[axis] for v in vals]

    def _bw():
        offset = 0
        for v, size in zip(vals, sizes):
            sl = [slice(None)] * out.data.ndim
            sl[axis] = slice(offset, offset + size)
            _acc(v, out.grad[tuple(sl)])
            offset += size

    out._backward = _bw
    return out


def dropout(x, rate: float, rng: np.random.Generator, train: bool) -> Value:
    """Inverted dropout: eval mode is the identity (same node returned)."""
    x = as_value(x)
    if not train or rate <= 0.0:
        return x
    mask = (rng.random(x.data.shape) >= rate) / (1.0 - rate)
    out = Value(x.data * mask, (x,), "dropout")

    def _bw():
        _acc(x, out.grad * mask, own=True)

    out._backward = _bw
    return out


def reshape(x, shape: tuple[int, ...]) -> Value:
    x = as_value(x)
    out = Value(x.data.reshape(shape), (x,), "reshape")

    def _bw():
        _acc(x, out.grad.reshape(x.data.shape))

    out._backward = _bw
    return out


def transpose_last2(x) -> Value:
    x = as_value(x)
    out = Value(np.swapaxes(x.data, -1, -2), (x,), "transpose")

    def _bw():
        _acc(x, np.swapaxes(out.grad, -1, -2))

    out._backward = _bw
    return out


def slice_last(x, start: int, stop: int) -> Value:
    """Contiguous slice along the last axis."""
    x = as_value(x)
    out = Value(x.data[..., start:stop], (x,), "slice")

    def _bw():
        g = np.zeros_like(x.data)
        g[..., start:stop] = out.grad
        _acc(x, g, own=True)

    out._backward = _bw
    return out


def take_token(x, index: int) -> Value:
    """Select one token from a (batch, tokens, dim) value -> (batch, dim)."""
    x = as_value(x)
    if x.data.ndim != 3:
        raise DimensionError("take_token expects a 3-D value")
    out = Value(x.data[:, index, :], (x,), "take_token")

    def _bw():
        g = np.zeros_like(x.data)
        g[:, index, :] = out.grad
        _acc(x, g, own=True)

    out._backward = _bw
    return out


def softmax_last(x) -> Value:
    """Row softmax over the last axis (shift-stabilised)."""
    x = as_value(x)
    shifted = x.data - np.max(x.data, axis=-1, keepdims=True)
    e = np.exp(shifted)
    s = e / e.sum(axis=-1, keepdims=True)
    out = Value(s, (x,), "softmax")

    def _bw():
        g = out.grad
        _acc(x, s * (g - np.sum(g * s, axis=-1, keepdims=True)), own=True)

    out._backward = _bw
    return out


def layer_norm(x, gain, bias, eps: float = 1e-5) -> Value:
    """Normalise over the last axis then apply elementwise gain and bias."""
    x, gain, bias = as_value(x), as_value(gain), as_value(bias)
    mu = x.data.mean(axis=-1, keepdims=True)
    var = x.data.var(axis=-1, keepdims=True)
    inv = 1.0 / np.sqrt(var + eps)
    x_hat = (x.data - mu) * inv
    out = Value(x_hat * gain.data + bias.data, (x, gain, bias), "layer_norm")

    def _bw():
        g = out.grad
        _acc(gain, _unbroadcast(g * x_hat, gain.data.shape), own=True)
        _acc(bias, _unbroadcast(g, bias.data.shape))
        gy = g * gain.data
        dx = inv * (
            gy
            - gy.mean(axis=-1, keepdims=True)
            - x_hat * np.mean(gy * x_hat, axis=-1, keepdims=True)
        )
        _acc(x, dx, own=True)

    out._backward = _bw
    return out


def affine(x, w, b) -> Value:
    return add(matmul(x, w), b)


def backward(root: Value) -> None:
    """Populate grads of every node reachable from a scalar root."""
    if root.data.size != 1:
        raise ContractError(f"backward root must be scalar, got shape {root.data.shape}")

    topo: list[Value] = []
    visited: set[int] = set()
    stack: list[tuple[Value, bool]] = [(root, False)]
    while stack:
        node, processed = stack.pop()
        if processed:
            topo.append(node)
            continue
        if id(node) in visited:
            continue
        visited.add(id(node))
        stack.append((node, True))
        for p in node.parents:
            if id(p) not in visited:
                stack.append((p, False))

    for node in topo:
        node.grad = None
    root.grad = np.ones_like(root.data)
    for node in reversed(topo):
        if node._backward is not None:
            node._backward()


def zero_grads(params: Iterable[Value]) -> None:
    for p in params:
        if p.grad is not None and p.grad.shape == p.data.shape:
            p.grad.fill(0.0)
        else:
            p.grad = np.zeros_like(p.data)
