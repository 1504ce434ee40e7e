"""Small CART trees and a bagged forest over a few numeric features."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class _Node:
    value: float  # fraction of positives at this node
    feature: int = -1
    threshold: float = 0.0
    left: "_Node | None" = None
    right: "_Node | None" = None


def _best_split(x: np.ndarray, y: np.ndarray, features, min_leaf: int):
    n = len(y)
    best = (None, None, np.inf)
    for f in features:
        order = np.argsort(x[:, f], kind="stable")
        xs, ys = x[order, f], y[order]
        pos_left = np.cumsum(ys)[:-1]
        n_left = np.arange(1, n)
        n_right = n - n_left
        pos_right = ys.sum() - pos_left
        valid = (xs[1:] > xs[:-1]) & (n_left >= min_leaf) & (n_right >= min_leaf)
        if not valid.any():
            continue
        p_l = pos_left / n_left
        p_r = pos_right / n_right
        # weighted Gini impurity of the two children
        gini = n_left * 2 * p_l * (1 - p_l) + n_right * 2 * p_r * (1 - p_r)
        gini = np.where(valid, gini, np.inf)
        i = int(np.argmin(gini))
        if gini[i] < best[2]:
            best = (f, (xs[i] + xs[i + 1]) / 2.0, gini[i])
    return best


class DecisionTree:
    def __init__(self, max_depth: int = 6, min_leaf: int = 2, max_features: int | None = None):
        self.max_depth = max_depth
        self.min_leaf = min_leaf
        self.max_features = max_features
        self.root: _Node | None = None

    def fit(self, x: np.ndarray, y: np.ndarray, rng: np.random.Generator) -> "DecisionTree":
        self.root = self._grow(np.asarray(x, float), np.asarray(y, float), 0, rng)
        return self

    def _grow(self, x, y, depth, rng) -> _Node:
        node = _Node(float(y.mean()))
        if depth >= self.max_depth or len(y) < 2 * self.min_leaf or node.value in (0.0, 1.0):
            return node
        nf = x.shape[1]
        k = self.max_features or nf
        features = np.sort(rng.choice(nf, size=min(k, nf), replace=False))
        f, thr, _ = _best_split(x, y, features, self.min_leaf)
        if f is None:
            return node
        mask = x[:, f] <= thr
        node.feature, node.threshold = int(f), float(thr)
        node.left = self._grow(x[mask], y[mask], depth + 1, rng)
        node.right = self._grow(x[~mask], y[~mask], depth + 1, rng)
        return node

    def predict_proba(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, float)
        out = np.empty(len(x))
        stack = [(self.root, np.arange(len(x)))]
        while stack:
            node, idx = stack.pop()
            if node.left is None:
                out[idx] = node.value
                continue
            go_left = x[idx, node.feature] <= node.threshold
            stack.append((node.left, idx[go_left]))
            stack.append((node.right, idx[~go_left]))
        return out


class RandomForest:
    def __init__(self, n_trees: int = 25, max_depth: int = 6, min_leaf: int = 2,
                 max_features: int | None = None, seed: int = 0):
        if n_trees < 1:
            raise ValueError("n_trees must be >= 1")
        self.n_trees = n_trees
        self.max_depth = max_depth
        self.min_leaf = min_leaf
        self.max_features = max_features
        self.seed = seed
        self.trees: list[DecisionTree] = []

    def fit(self, x: np.ndarray, y: np.ndarray) -> "RandomForest":
        x = np.asarray(x, float)
        y = np.asarray(y, float)
        rng = np.random.default_rng(self.seed)
        max_features = self.max_features or max(1, int(np.sqrt(x.shape[1])))
        self.trees = []
        for _ in range(self.n_trees):
            idx = rng.integers(0, len(y), size=len(y))
            tree = DecisionTree(self.max_depth, self.min_leaf, max_features)
            self.trees.append(tree.fit(x[idx], y[idx], rng))
        return self

    def predict_proba(self, x: np.ndarray) -> np.ndarray:
        return np.mean([t.predict_proba(x) for t in self.trees], axis=0)

    def predict(self, x: np.ndarray) -> np.ndarray:
        return (self.predict_proba(x) >= 0.5).astype(int)
