"""Gradient-boosted decision trees with second-order leaf values.

Trees grow leaf-wise (best split gain first) on binned features up to a
leaf budget, the way tree-count/leaf-count hyperparameters expect. The
logistic link handles binary tasks, softmax handles multiclass, plain
squared error handles regression. Training is deterministic: no row or
feature subsampling is involved.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field

import numpy as np

from ._binning import Bins, bin_features, candidate_mask, histograms


@dataclass
class _Tree:
    feature: list[int] = field(default_factory=list)
    threshold: list[float] = field(default_factory=list)
    left: list[int] = field(default_factory=list)
    right: list[int] = field(default_factory=list)
    value: list[float] = field(default_factory=list)

    def new_node(self) -> int:
        self.feature.append(-1)
        self.threshold.append(0.0)
        self.left.append(-1)
        self.right.append(-1)
        self.value.append(0.0)
        return len(self.feature) - 1

    def predict(self, X: np.ndarray) -> np.ndarray:
        node = np.zeros(X.shape[0], dtype=np.int64)
        feature = np.asarray(self.feature)
        threshold = np.asarray(self.threshold)
        left = np.asarray(self.left)
        right = np.asarray(self.right)
        value = np.asarray(self.value)
        while True:
            internal = feature[node] >= 0
            if not internal.any():
                return value[node]
            rows = np.flatnonzero(internal)
            f = feature[node[rows]]
            go_left = X[rows, f] <= threshold[node[rows]]
            node[rows] = np.where(go_left, left[node[rows]], right[node[rows]])


def _best_split(bins: Bins, all_feats, valid, idx, g, h, reg_lambda, min_child_weight):
    """Highest-gain (gain, feature, threshold) over every feature at once."""
    if bins.nb < 2:
        return 0.0, -1, 0.0
    hist_g, hist_h = histograms(bins, idx, all_feats, [g, h])
    gl = np.cumsum(hist_g, axis=1)[:, :-1]
    hl = np.cumsum(hist_h, axis=1)[:, :-1]
    g_total = float(g[idx].sum())
    h_total = float(h[idx].sum())
    gr = g_total - gl
    hr = h_total - hl
    ok = valid & (hl >= min_child_weight) & (hr >= min_child_weight)
    if not ok.any():
        return 0.0, -1, 0.0
    parent = g_total * g_total / (h_total + reg_lambda)
    with np.errstate(divide="ignore", invalid="ignore"):
        gain = gl * gl / (hl + reg_lambda) + gr * gr / (hr + reg_lambda) - parent
    gain[~ok] = -np.inf
    j, k = np.unravel_index(int(np.argmax(gain)), gain.shape)
    return float(gain[j, k]), int(all_feats[j]), float(bins.thresholds[all_feats[j]][k])


def _grow_tree(bins: Bins, g, h, leaf_num, min_child_weight, reg_lambda):
    """Leaf-wise growth; returns the tree and (rows, value) per final leaf."""
    tree = _Tree()
    root = tree.new_node()
    n, f = bins.codes.shape
    all_feats = np.arange(f, dtype=np.int64)
    valid = candidate_mask(bins, all_feats)
    all_rows = np.arange(n)
    heap = []
    counter = 0  # heap tiebreak keeps expansion order deterministic

    def enqueue(node_id, rows):
        nonlocal counter
        gain, feat, thr = _best_split(
            bins, all_feats, valid, rows, g, h, reg_lambda, min_child_weight
        )
        heapq.heappush(heap, (-gain, counter, node_id, rows, feat, thr))
        counter += 1

    enqueue(root, all_rows)
    n_leaves = 1
    leaves: dict[int, np.ndarray] = {root: all_rows}
    while heap and n_leaves < leaf_num:
        neg_gain, _, node_id, rows, feat, thr = heapq.heappop(heap)
        if -neg_gain <= 0.0 or feat < 0:
            break
        k = int(np.searchsorted(bins.thresholds[feat], thr, side="left"))
        go_left = bins.codes[rows, feat] <= k
        left_rows, right_rows = rows[go_left], rows[~go_left]
        lid, rid = tree.new_node(), tree.new_node()
        tree.feature[node_id] = feat
        tree.threshold[node_id] = thr
        tree.left[node_id] = lid
        tree.right[node_id] = rid
        del leaves[node_id]
        leaves[lid] = left_rows
        leaves[rid] = right_rows
        enqueue(lid, left_rows)
        enqueue(rid, right_rows)
        n_leaves += 1
    out = []
    for node_id, rows in leaves.items():
        val = -g[rows].sum() / (h[rows].sum() + reg_lambda)
        tree.value[node_id] = float(val)
        out.append((rows, float(val)))
    return tree, out


def _sigmoid(z):
    return 1.0 / (1.0 + np.exp(-np.clip(z, -500, 500)))


def _softmax(z):
    z = z - z.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


class BoostedTrees:
    """Fitted boosting ensemble; ``rounds[r][k]`` is round r's class-k tree."""

    def __init__(self, task, n_classes, base_score, learning_rate, rounds):
        self.task = task
        self.n_classes = n_classes
        self.base_score = base_score
        self.learning_rate = learning_rate
        self.rounds = rounds

    @property
    def n_trees(self) -> int:
        return len(self.rounds)

    def raw_scores(self, X: np.ndarray) -> np.ndarray:
        if self.task == "multiclass":
            scores = np.tile(self.base_score, (X.shape[0], 1))
            for round_trees in self.rounds:
                for k, tree in enumerate(round_trees):
                    scores[:, k] += self.learning_rate * tree.predict(X)
            return scores
        scores = np.full(X.shape[0], self.base_score[0])
        for (tree,) in self.rounds:
            scores += self.learning_rate * tree.predict(X)
        return scores

    def predict(self, X: np.ndarray) -> np.ndarray:
        scores = self.raw_scores(X)
        if self.task == "regression":
            return scores
        if self.task == "binary":
            p1 = _sigmoid(scores)
            return np.column_stack([1.0 - p1, p1])
        return _softmax(scores)


def train_gbt(
    config: dict, X: np.ndarray, y: np.ndarray, task: str, n_classes: int, seed: int
) -> BoostedTrees:
    tree_num = int(config["tree_num"])
    leaf_num = int(config["leaf_num"])
    mcw = float(config["min_child_weight"])
    lr = float(config["learning_rate"])
    lam = float(config["reg_lambda"])
    n = X.shape[0]
    bins = bin_features(X)

    if task == "regression":
        base = np.array([float(y.mean())])
        F = np.full(n, base[0])
        rounds = []
        for _ in range(tree_num):
            g = F - y  # d/dF of 0.5*(F-y)^2
            h = np.ones(n)
            tree, leaves = _grow_tree(bins, g, h, leaf_num, mcw, lam)
            for rows, val in leaves:
                F[rows] += lr * val
            rounds.append((tree,))
        return BoostedTrees(task, 0, base, lr, rounds)

    if task == "binary":
        p = min(max(float(y.mean()), 1e-12), 1 - 1e-12)
        base = np.array([np.log(p / (1.0 - p))])
        F = np.full(n, base[0])
        yf = y.astype(float)
        rounds = []
        for _ in range(tree_num):
            prob = _sigmoid(F)
            g = prob - yf
            h = prob * (1.0 - prob)
            tree, leaves = _grow_tree(bins, g, h, leaf_num, mcw, lam)
            for rows, val in leaves:
                F[rows] += lr * val
            rounds.append((tree,))
        return BoostedTrees(task, 2, base, lr, rounds)

    # multiclass: one tree per class per round against softmax gradients
    priors = np.bincount(y.astype(int), minlength=n_classes) / n
    base = np.log(np.clip(priors, 1e-12, None))
    F = np.tile(base, (n, 1))
    onehot = np.zeros((n, n_classes))
    onehot[np.arange(n), y.astype(int)] = 1.0
    rounds = []
    for _ in range(tree_num):
        prob = _softmax(F)
        round_trees = []
        for k in range(n_classes):
            g = prob[:, k] - onehot[:, k]
            h = prob[:, k] * (1.0 - prob[:, k])
            tree, leaves = _grow_tree(bins, g, h, leaf_num, mcw, lam)
            for rows, val in leaves:
                F[rows, k] += lr * val
            round_trees.append(tree)
        rounds.append(tuple(round_trees))
    return BoostedTrees(task, n_classes, base, lr, rounds)
