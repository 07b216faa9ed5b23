"""Histogram gradient-boosted regression trees (squared error).

Self-contained tree backend for the meta-predictor: quantile binning, one
histogram pass per node (via the kernel backend), depth-wise growth.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import ContractError

N_ROUNDS = 100
MAX_DEPTH = 6
SHRINKAGE = 0.1
N_BINS = 32
MIN_GAIN = 1e-12


@dataclass
class _Node:
    feature: int = -1
    threshold: float = 0.0
    bin_id: int = -1
    left: "_Node | None" = None
    right: "_Node | None" = None
    value: float = 0.0

    @property
    def is_leaf(self) -> bool:
        return self.feature < 0

    def to_dict(self) -> dict:
        if self.is_leaf:
            return {"value": self.value}
        return {
            "feature": self.feature,
            "threshold": self.threshold,
            "left": self.left.to_dict(),
            "right": self.right.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "_Node":
        if "value" in d:
            return cls(value=d["value"])
        return cls(
            feature=d["feature"],
            threshold=d["threshold"],
            left=cls.from_dict(d["left"]),
            right=cls.from_dict(d["right"]),
        )


def _predict_node(node: _Node, X: np.ndarray, out: np.ndarray, idx: np.ndarray) -> None:
    if node.is_leaf:
        out[idx] += node.value
        return
    left = X[idx, node.feature] < node.threshold
    _predict_node(node.left, X, out, idx[left])
    _predict_node(node.right, X, out, idx[~left])


@dataclass
class HistGBDT:
    n_rounds: int = N_ROUNDS
    max_depth: int = MAX_DEPTH
    learning_rate: float = SHRINKAGE
    n_bins: int = N_BINS
    base_score: float = 0.0
    bin_edges: list[np.ndarray] = field(default_factory=list)
    trees: list[_Node] = field(default_factory=list)
    train_mse: list[float] = field(default_factory=list)

    def fit(self, X: np.ndarray, y: np.ndarray) -> "HistGBDT":
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64).reshape(-1)
        if X.shape[0] != y.shape[0]:
            raise ContractError("X and y row counts differ")
        n, f = X.shape
        self.bin_edges = []
        codes = np.empty((n, f), dtype=np.uint8)
        qs = np.linspace(0, 1, self.n_bins + 1)[1:-1]
        for j in range(f):
            edges = np.unique(np.quantile(X[:, j], qs))
            self.bin_edges.append(edges)
            codes[:, j] = np.searchsorted(edges, X[:, j], side="right")
        self.base_score = float(y.mean())
        pred = np.full(n, self.base_score)
        self.trees = []
        self.train_mse = []
        all_idx = np.arange(n, dtype=np.int64)
        for _ in range(self.n_rounds):
            residual = y - pred
            tree = self._build_tree(codes, residual, all_idx)
            self.trees.append(tree)
            delta = np.zeros(n)
            self._apply_binned(tree, codes, delta, all_idx)
            pred += delta
            self.train_mse.append(float(np.mean((y - pred) ** 2)))
        return self

    def _build_tree(self, codes: np.ndarray, residual: np.ndarray, idx: np.ndarray) -> _Node:
        root = _Node()
        stack = [(root, idx, 0)]
        while stack:
            node, node_idx, depth = stack.pop()
            g = float(residual[node_idx].sum())
            n_node = len(node_idx)
            node.value = self.learning_rate * g / n_node
            if depth >= self.max_depth or n_node < 2:
                continue
            sums, counts = _kernels.hist_sums(codes, residual, node_idx, self.n_bins)
            gl = np.cumsum(sums, axis=1)[:, :-1]
            nl = np.cumsum(counts, axis=1)[:, :-1]
            gr, nr = g - gl, n_node - nl
            with np.errstate(divide="ignore", invalid="ignore"):
                gain = gl**2 / nl + gr**2 / nr - g**2 / n_node
            gain[(nl == 0) | (nr == 0)] = -np.inf
            best_flat = int(np.argmax(gain))
            best_gain = gain.ravel()[best_flat]
            if not np.isfinite(best_gain) or best_gain <= MIN_GAIN:
                continue
            feat, b = divmod(best_flat, self.n_bins - 1)
            edges = self.bin_edges[feat]
            if b >= len(edges):  # split bin beyond the deduped edge list
                continue
            node.feature = feat
            node.bin_id = b
            node.threshold = float(edges[b])
            left_mask = codes[node_idx, feat] <= b
            node.left, node.right = _Node(), _Node()
            stack.append((node.left, node_idx[left_mask], depth + 1))
            stack.append((node.right, node_idx[~left_mask], depth + 1))
        return root

    def _apply_binned(self, node: _Node, codes, out, idx) -> None:
        if node.is_leaf:
            out[idx] += node.value
            return
        left = codes[idx, node.feature] <= node.bin_id
        self._apply_binned(node.left, codes, out, idx[left])
        self._apply_binned(node.right, codes, out, idx[~left])

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        out = np.full(X.shape[0], self.base_score)
        idx = np.arange(X.shape[0])
        for tree in self.trees:
            _predict_node(tree, X, out, idx)
        return out

    def to_dict(self) -> dict:
        return {
            "n_rounds": self.n_rounds,
            "max_depth": self.max_depth,
            "learning_rate": self.learning_rate,
            "n_bins": self.n_bins,
            "base_score": self.base_score,
            "trees": [t.to_dict() for t in self.trees],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "HistGBDT":
        model = cls(
            n_rounds=d["n_rounds"],
            max_depth=d["max_depth"],
            learning_rate=d["learning_rate"],
            n_bins=d["n_bins"],
            base_score=d["base_score"],
        )
        model.trees = [_Node.from_dict(t) for t in d["trees"]]
        return model
