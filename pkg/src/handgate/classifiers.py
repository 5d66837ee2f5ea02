"""Minimal nearest-neighbor and random-forest classifiers.

Implemented directly on numpy so the evaluation pipeline controls every
detail that matters to it: Euclidean k-NN with mean-distance tie-breaking,
and CART/gini trees bagged into a forest with per-tree bootstrap masks kept
around — the out-of-bag bookkeeping is what the permutation-importance
diagnostics consume, so it is first-class here rather than hidden.

Labels may be any hashable values; they are mapped to a compact integer
range internally and mapped back on prediction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .imaging import make_rng

__all__ = ["KnnClassifier", "DecisionTree", "RandomForest"]


class KnnClassifier:
    """k-nearest neighbors, Euclidean metric, majority vote.

    Vote ties break toward the candidate label with the smaller mean
    distance among its contributing neighbors; residual ties break toward
    the smaller label index for determinism.
    """

    def __init__(self, k: int = 1):
        if k < 1:
            raise ValueError("k must be at least 1")
        self.k = k
        self._x: np.ndarray | None = None
        self._y: np.ndarray | None = None
        self.classes_: np.ndarray | None = None

    def fit(self, x: np.ndarray, y) -> "KnnClassifier":
        x = np.asarray(x, np.float64)
        if x.ndim != 2 or len(x) == 0:
            raise ValueError("training data must be a non-empty 2-D array")
        if self.k > len(x):
            raise ValueError(f"k={self.k} exceeds the {len(x)} training samples")
        self.classes_, self._y = np.unique(np.asarray(y), return_inverse=True)
        self._x = x
        return self

    def predict(self, probes: np.ndarray) -> np.ndarray:
        if self._x is None:
            raise RuntimeError("classifier is not fitted")
        probes = np.atleast_2d(np.asarray(probes, np.float64))
        d2 = (
            (probes**2).sum(1)[:, None]
            - 2.0 * probes @ self._x.T
            + (self._x**2).sum(1)[None, :]
        )
        np.maximum(d2, 0.0, out=d2)
        out = np.empty(len(probes), dtype=int)
        k = self.k
        for i, row in enumerate(d2):
            nn = np.argpartition(row, k - 1)[:k] if k < len(row) else np.arange(len(row))
            labels = self._y[nn]
            dists = np.sqrt(row[nn])
            counts = np.bincount(labels, minlength=len(self.classes_))
            best = counts.max()
            tied = np.flatnonzero(counts == best)
            if len(tied) == 1:
                out[i] = tied[0]
            else:
                means = [dists[labels == t].mean() for t in tied]
                out[i] = tied[int(np.argmin(means))]
        return self.classes_[out]


@dataclass
class _Node:
    feature: int = -1
    threshold: float = 0.0
    left: "_Node | None" = None
    right: "_Node | None" = None
    label: int = 0

    @property
    def is_leaf(self) -> bool:
        return self.left is None


class DecisionTree:
    """CART classification tree, gini impurity, no pruning.

    `max_features` caps the features examined per split (sampled fresh at
    every node); None examines all of them.
    """

    def __init__(self, max_features: int | None = None, min_samples_split: int = 2):
        self.max_features = max_features
        self.min_samples_split = min_samples_split
        self.root: _Node | None = None
        self.n_classes_ = 0

    def fit(self, x: np.ndarray, y: np.ndarray, rng=None) -> "DecisionTree":
        x = np.asarray(x, np.float64)
        y = np.asarray(y, dtype=int)
        self.n_classes_ = int(y.max()) + 1 if len(y) else 0
        rng = make_rng(rng)
        self.root = self._grow(x, y, rng)
        return self

    def _grow(self, x: np.ndarray, y: np.ndarray, rng) -> _Node:
        counts = np.bincount(y, minlength=self.n_classes_)
        majority = int(counts.argmax())
        if len(y) < self.min_samples_split or counts.max() == len(y):
            return _Node(label=majority)

        n_feat = x.shape[1]
        m = self.max_features or n_feat
        feats = rng.choice(n_feat, size=min(m, n_feat), replace=False)
        best_gain, best_f, best_t = 0.0, -1, 0.0
        parent_gini = 1.0 - ((counts / len(y)) ** 2).sum()
        for f in feats:
            vals = x[:, f]
            order = np.argsort(vals, kind="stable")
            sv, sy = vals[order], y[order]
            boundaries = np.flatnonzero(np.diff(sv) > 0)
            if len(boundaries) == 0:
                continue
            onehot = np.zeros((len(sy), self.n_classes_))
            onehot[np.arange(len(sy)), sy] = 1.0
            cum = onehot.cumsum(0)
            total = cum[-1]
            nl = (boundaries + 1).astype(np.float64)
            nr = len(sy) - nl
            cl = cum[boundaries]
            cr = total - cl
            gl = 1.0 - ((cl / nl[:, None]) ** 2).sum(1)
            gr = 1.0 - ((cr / nr[:, None]) ** 2).sum(1)
            child = (nl * gl + nr * gr) / len(sy)
            gains = parent_gini - child
            j = int(gains.argmax())
            if gains[j] > best_gain + 1e-12:
                best_gain = float(gains[j])
                best_f = int(f)
                b = boundaries[j]
                best_t = float((sv[b] + sv[b + 1]) / 2.0)
        if best_f < 0:
            return _Node(label=majority)
        go_left = x[:, best_f] <= best_t
        return _Node(
            feature=best_f,
            threshold=best_t,
            left=self._grow(x[go_left], y[go_left], rng),
            right=self._grow(x[~go_left], y[~go_left], rng),
            label=majority,
        )

    def predict(self, x: np.ndarray) -> np.ndarray:
        if self.root is None:
            raise RuntimeError("tree is not fitted")
        x = np.atleast_2d(np.asarray(x, np.float64))
        out = np.empty(len(x), dtype=int)
        self._route(self.root, x, np.arange(len(x)), out)
        return out

    def _route(self, node: _Node, x: np.ndarray, idx: np.ndarray, out: np.ndarray):
        if node.is_leaf:
            out[idx] = node.label
            return
        mask = x[idx, node.feature] <= node.threshold
        if mask.any():
            self._route(node.left, x, idx[mask], out)
        if (~mask).any():
            self._route(node.right, x, idx[~mask], out)


@dataclass
class RandomForest:
    """Bagged CART trees with sqrt-feature splits and OOB bookkeeping.

    After fit: `trees_` holds the trees, `oob_masks_[t]` flags the training
    rows tree t never saw, and `oob_error_` is the out-of-bag estimate (the
    vote over each row's non-training trees, against its true label).
    """

    n_trees: int = 100
    max_features: str | int = "sqrt"
    seed: int | None = None
    trees_: list = field(default_factory=list, repr=False)
    oob_masks_: np.ndarray | None = field(default=None, repr=False)
    classes_: np.ndarray | None = field(default=None, repr=False)
    oob_error_: float | None = None

    def _feature_budget(self, n_features: int) -> int:
        if self.max_features == "sqrt":
            return max(int(round(np.sqrt(n_features))), 1)
        return min(int(self.max_features), n_features)

    def fit(self, x: np.ndarray, y) -> "RandomForest":
        if self.n_trees < 1:
            raise ValueError("forest needs at least one tree")
        x = np.asarray(x, np.float64)
        self.classes_, yi = np.unique(np.asarray(y), return_inverse=True)
        n = len(x)
        rng = make_rng(self.seed)
        m = self._feature_budget(x.shape[1])
        self.trees_ = []
        self.oob_masks_ = np.zeros((self.n_trees, n), dtype=bool)
        for t in range(self.n_trees):
            boot = rng.integers(0, n, size=n)
            tree = DecisionTree(max_features=m).fit(x[boot], yi[boot], rng=rng)
            self.trees_.append(tree)
            mask = np.ones(n, dtype=bool)
            mask[boot] = False
            self.oob_masks_[t] = mask
        self.oob_error_ = self._compute_oob(x, yi)
        return self

    def _compute_oob(self, x: np.ndarray, yi: np.ndarray) -> float | None:
        n = len(x)
        votes = np.zeros((n, len(self.classes_)), dtype=int)
        for tree, mask in zip(self.trees_, self.oob_masks_):
            if mask.any():
                pred = tree.predict(x[mask])
                votes[np.flatnonzero(mask), pred] += 1
        covered = votes.sum(1) > 0
        if not covered.any():
            return None
        wrong = votes[covered].argmax(1) != yi[covered]
        return float(wrong.mean())

    def predict(self, x: np.ndarray) -> np.ndarray:
        if not self.trees_:
            raise RuntimeError("forest is not fitted")
        x = np.atleast_2d(np.asarray(x, np.float64))
        votes = np.zeros((len(x), len(self.classes_)), dtype=int)
        for tree in self.trees_:
            votes[np.arange(len(x)), tree.predict(x)] += 1
        return self.classes_[votes.argmax(1)]
