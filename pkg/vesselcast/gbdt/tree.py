"""
Regression trees stored as flat node arrays, and additive ensembles of them.
"""

from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

PREDICT_CHUNK = 1024


@dataclass
class Tree:
    """
    One regression tree in breadth-first node order; node 0 is the root.

    A split node sends x left when x[feature] < threshold, and a missing
    x[feature] left when ``default_left``. Leaves have feature -1, children
    -1 and carry ``value``; split nodes carry value 0.
    """
    feature: np.ndarray
    threshold: np.ndarray
    default_left: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray

    @classmethod
    def leaf(cls, value: float) -> "Tree":
        return cls(
            feature=np.array([-1], dtype=np.int32),
            threshold=np.array([np.nan]),
            default_left=np.array([False]),
            left=np.array([-1], dtype=np.int32),
            right=np.array([-1], dtype=np.int32),
            value=np.array([value]),
        )

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    def is_leaf(self, node: int) -> bool:
        return self.feature[node] < 0

    def depth(self) -> int:
        depths = np.zeros(self.n_nodes, dtype=np.int64)
        for node in range(self.n_nodes):
            if self.feature[node] >= 0:
                depths[self.left[node]] = depths[node] + 1
                depths[self.right[node]] = depths[node] + 1
        return int(depths.max())

    def leaf_values(self) -> np.ndarray:
        return self.value[self.feature < 0]

    def predict_row(self, x: Sequence[float]) -> float:
        """Leaf value reached by one feature vector, walking node by node."""
        node = 0
        while self.feature[node] >= 0:
            v = x[self.feature[node]]
            if v != v:  # NaN
                go_left = bool(self.default_left[node])
            else:
                go_left = v < self.threshold[node]
            node = self.left[node] if go_left else self.right[node]
        return float(self.value[node])


@dataclass
class TreeEnsemble:
    """base_score + learning_rate * (sum of tree leaf values)."""
    base_score: float
    learning_rate: float
    trees: List[Tree] = field(default_factory=list)
    _packed: Optional[tuple] = field(default=None, repr=False, compare=False)

    def __len__(self) -> int:
        return len(self.trees)

    @property
    def n_nodes(self) -> int:
        return sum(t.n_nodes for t in self.trees)

    def _pack(self) -> tuple:
        """
        Concatenate every tree into global node arrays.

        Leaves point both children at themselves with a NaN threshold, so a
        fixed number of traversal steps leaves finished rows in place.
        """
        if self._packed is None:
            sizes = np.array([t.n_nodes for t in self.trees], dtype=np.int64)
            offsets = np.concatenate(([0], np.cumsum(sizes)[:-1]))
            feature, threshold, default_left, left, right, value = [], [], [], [], [], []
            for off, t in zip(offsets, self.trees):
                leaf = t.feature < 0
                own = np.arange(t.n_nodes, dtype=np.int64) + off
                feature.append(np.where(leaf, 0, t.feature))
                threshold.append(np.where(leaf, np.nan, t.threshold))
                default_left.append(np.where(leaf, True, t.default_left))
                left.append(np.where(leaf, own, t.left.astype(np.int64) + off))
                right.append(np.where(leaf, own, t.right.astype(np.int64) + off))
                value.append(t.value)
            depth = max(t.depth() for t in self.trees)
            self._packed = (
                offsets,
                np.concatenate(feature).astype(np.int64),
                np.concatenate(threshold),
                np.concatenate(default_left).astype(bool),
                np.concatenate(left),
                np.concatenate(right),
                np.concatenate(value),
                depth,
            )
        return self._packed

    def raw_sum(self, X: np.ndarray) -> np.ndarray:
        """Sum of leaf values per row, traversing all trees at once per chunk."""
        X = np.asarray(X, dtype=np.float64)
        n = len(X)
        total = np.zeros(n)
        if not self.trees or n == 0:
            return total
        roots, feature, threshold, default_left, left, right, value, depth = self._pack()
        for s in range(0, n, PREDICT_CHUNK):
            xs = X[s:s + PREDICT_CHUNK]
            rows = np.arange(len(xs))[:, None]
            nodes = np.broadcast_to(roots, (len(xs), len(roots))).copy()
            for _ in range(depth):
                x = xs[rows, feature[nodes]]
                go_left = np.where(np.isnan(x), default_left[nodes], x < threshold[nodes])
                nodes = np.where(go_left, left[nodes], right[nodes])
            total[s:s + PREDICT_CHUNK] = value[nodes].sum(axis=1)
        return total

    def predict(self, X: np.ndarray) -> np.ndarray:
        return self.base_score + self.learning_rate * self.raw_sum(X)

    def predict_row_naive(self, x: Sequence[float]) -> float:
        """Tree-by-tree reference walk of a single row."""
        s = 0.0
        for tree in self.trees:
            s += tree.predict_row(x)
        return self.base_score + self.learning_rate * s
