"""Classifier tests, including a pure-Python nearest-neighbor oracle."""

import math

import numpy as np
import pytest

from handgate.classifiers import DecisionTree, KnnClassifier, RandomForest


def knn_oracle(train_x, train_y, probe, k):
    """Brute-force reference: sort by distance, majority, mean-distance ties."""
    dists = []
    for row, label in zip(train_x, train_y):
        d = math.sqrt(sum((a - b) ** 2 for a, b in zip(row, probe)))
        dists.append((d, label))
    dists.sort(key=lambda t: t[0])
    top = dists[:k]
    counts = {}
    for d, label in top:
        counts.setdefault(label, []).append(d)
    best = max(len(v) for v in counts.values())
    tied = [lab for lab, v in counts.items() if len(v) == best]
    if len(tied) == 1:
        return tied[0]
    means = {lab: sum(counts[lab]) / len(counts[lab]) for lab in tied}
    low = min(means.values())
    return min(lab for lab, m in means.items() if m == low)


class TestKnn:
    def test_matches_oracle(self):
        rng = np.random.default_rng(0)
        x = rng.normal(size=(60, 5))
        y = rng.integers(0, 4, 60)
        clf = KnnClassifier(k=3).fit(x, y)
        probes = rng.normal(size=(40, 5))
        got = clf.predict(probes)
        want = [knn_oracle(x.tolist(), y.tolist(), p.tolist(), 3) for p in probes]
        assert got.tolist() == want

    def test_k1_memorizes_training_set(self):
        rng = np.random.default_rng(1)
        x = rng.normal(size=(30, 4))
        y = rng.integers(0, 3, 30)
        clf = KnnClassifier(k=1).fit(x, y)
        assert (clf.predict(x) == y).all()

    def test_tie_breaks_by_mean_distance(self):
        # probe at origin: label 0 neighbors at 1 and 3, label 1 at 1.5 and 2
        x = np.array([[1.0], [3.0], [1.5], [2.0]])
        y = np.array([0, 0, 1, 1])
        clf = KnnClassifier(k=4).fit(x, y)
        # mean(label 1) = 1.75 < mean(label 0) = 2.0
        assert clf.predict([[0.0]])[0] == 1

    def test_string_labels_round_trip(self):
        x = np.array([[0.0], [10.0]])
        clf = KnnClassifier(k=1).fit(x, ["left", "right"])
        assert clf.predict([[1.0]])[0] == "left"

    def test_k_too_large(self):
        with pytest.raises(ValueError, match="exceeds"):
            KnnClassifier(k=5).fit(np.zeros((3, 2)), [0, 1, 2])


class TestDecisionTree:
    def test_separable_split(self):
        x = np.array([[0.0], [1.0], [10.0], [11.0]])
        y = np.array([0, 0, 1, 1])
        tree = DecisionTree().fit(x, y)
        assert tree.predict([[0.5], [10.5]]).tolist() == [0, 1]

    def test_constant_features_fall_back_to_majority(self):
        x = np.zeros((5, 3))
        y = np.array([0, 0, 0, 1, 1])
        tree = DecisionTree().fit(x, y)
        assert tree.predict(np.zeros((2, 3))).tolist() == [0, 0]

    def test_memorizes_distinct_points(self):
        rng = np.random.default_rng(2)
        x = rng.normal(size=(40, 3))
        y = rng.integers(0, 5, 40)
        tree = DecisionTree().fit(x, y, rng=3)
        assert (tree.predict(x) == y).mean() == 1.0


class TestRandomForest:
    def _blobs(self, seed=4, n=120):
        rng = np.random.default_rng(seed)
        x0 = rng.normal(0, 0.4, size=(n // 2, 4))
        x1 = rng.normal(3, 0.4, size=(n // 2, 4))
        x = np.vstack([x0, x1])
        y = np.array([0] * (n // 2) + [1] * (n // 2))
        return x, y

    def test_separable_training_accuracy(self):
        x, y = self._blobs()
        rf = RandomForest(n_trees=100, seed=0).fit(x, y)
        assert (rf.predict(x) == y).mean() == 1.0

    def test_deterministic_given_seed(self):
        x, y = self._blobs(seed=5)
        p1 = RandomForest(n_trees=25, seed=7).fit(x, y).predict(x)
        p2 = RandomForest(n_trees=25, seed=7).fit(x, y).predict(x)
        assert (p1 == p2).all()

    def test_oob_error_exposed_and_small_when_separable(self):
        x, y = self._blobs(seed=6)
        rf = RandomForest(n_trees=60, seed=1).fit(x, y)
        assert rf.oob_error_ is not None
        assert 0.0 <= rf.oob_error_ <= 0.1

    def test_oob_masks_cover_training_rows(self):
        x, y = self._blobs(seed=7, n=60)
        rf = RandomForest(n_trees=40, seed=2).fit(x, y)
        assert rf.oob_masks_.shape == (40, 60)
        # each bootstrap leaves ~1/e of rows out
        frac = rf.oob_masks_.mean()
        assert 0.25 < frac < 0.45

    def test_string_labels(self):
        x, y = self._blobs(seed=8)
        labels = np.where(y == 0, "real", "fake")
        rf = RandomForest(n_trees=30, seed=3).fit(x, labels)
        assert set(rf.predict(x)) <= {"real", "fake"}
