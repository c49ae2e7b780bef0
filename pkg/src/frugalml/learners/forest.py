"""Random forest of CART trees on binned features.

Each tree sees a bootstrap resample and considers a random feature subset
at every node. Classification splits use gini or entropy over bin-wise
class histograms; regression uses variance reduction. Leaves keep class
proportions so ensemble predictions are probability averages.
"""

from __future__ import annotations

import numpy as np

from ._binning import Bins, bin_features, candidate_mask, class_histograms, histograms


class _CartTree:
    __slots__ = ("feature", "threshold", "left", "right", "leaf_value")

    def __init__(self):
        self.feature: list[int] = []
        self.threshold: list[float] = []
        self.left: list[int] = []
        self.right: list[int] = []
        self.leaf_value: list = []

    def new_node(self) -> int:
        self.feature.append(-1)
        self.threshold.append(0.0)
        self.left.append(-1)
        self.right.append(-1)
        self.leaf_value.append(0.0)
        return len(self.feature) - 1

    def predict(self, X: np.ndarray, n_outputs: int) -> np.ndarray:
        n = X.shape[0]
        feature = np.asarray(self.feature)
        threshold = np.asarray(self.threshold)
        left = np.asarray(self.left)
        right = np.asarray(self.right)
        node = np.zeros(n, dtype=np.int64)
        while True:
            internal = feature[node] >= 0
            if not internal.any():
                break
            rows = np.flatnonzero(internal)
            f = feature[node[rows]]
            go_left = X[rows, f] <= threshold[node[rows]]
            node[rows] = np.where(go_left, left[node[rows]], right[node[rows]])
        if n_outputs == 0:
            return np.array([self.leaf_value[i] for i in node])
        out = np.empty((n, n_outputs))
        for i, nd in enumerate(node):
            out[i] = self.leaf_value[nd]
        return out


def _class_split(bins, rows, feats, y, n_classes, criterion):
    """Best (impurity decrease, feature, threshold) over a feature subset."""
    if bins.nb < 2:
        return -np.inf, -1, 0.0
    hist = class_histograms(bins, rows, feats, y, n_classes)  # (fs, nb, K)
    left = np.cumsum(hist, axis=1)[:, :-1, :]
    total = hist.sum(axis=1)[:, None, :]
    right = total - left
    nl = left.sum(axis=2)
    nr = right.sum(axis=2)
    ok = candidate_mask(bins, feats) & (nl > 0) & (nr > 0)
    if not ok.any():
        return -np.inf, -1, 0.0
    n = float(rows.size)
    with np.errstate(divide="ignore", invalid="ignore"):
        pl = left / np.maximum(nl, 1.0)[:, :, None]
        pr = right / np.maximum(nr, 1.0)[:, :, None]
        p_all = total[:, 0, :] / n
        if criterion == "entropy":
            il = -np.sum(np.where(pl > 0, pl * np.log2(pl, where=pl > 0), 0.0), axis=2)
            ir = -np.sum(np.where(pr > 0, pr * np.log2(pr, where=pr > 0), 0.0), axis=2)
            parent = -np.sum(np.where(p_all > 0, p_all * np.log2(p_all, where=p_all > 0), 0.0), axis=1)
        else:
            il = 1.0 - np.sum(pl * pl, axis=2)
            ir = 1.0 - np.sum(pr * pr, axis=2)
            parent = 1.0 - np.sum(p_all * p_all, axis=1)
    dec = parent[:, None] - (nl * il + nr * ir) / n
    dec[~ok] = -np.inf
    j, k = np.unravel_index(int(np.argmax(dec)), dec.shape)
    feat = int(feats[j])
    return float(dec[j, k]), feat, float(bins.thresholds[feat][k])


def _reg_split(bins, rows, feats, y):
    """Best (gain, feature, threshold) by sum-of-squares reduction."""
    if bins.nb < 2:
        return -np.inf, -1, 0.0
    cnt, sums = histograms(bins, rows, feats, [None, y])
    nl = np.cumsum(cnt, axis=1)[:, :-1]
    sl = np.cumsum(sums, axis=1)[:, :-1]
    n = float(rows.size)
    total = float(y[rows].sum())
    nr = n - nl
    sr = total - sl
    ok = candidate_mask(bins, feats) & (nl > 0) & (nr > 0)
    if not ok.any():
        return -np.inf, -1, 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        gain = sl * sl / np.maximum(nl, 1.0) + sr * sr / np.maximum(nr, 1.0) - total * total / n
    gain[~ok] = -np.inf
    j, k = np.unravel_index(int(np.argmax(gain)), gain.shape)
    if gain[j, k] <= 1e-12:
        return -np.inf, -1, 0.0
    feat = int(feats[j])
    return float(gain[j, k]), feat, float(bins.thresholds[feat][k])


def _grow_cart(bins: Bins, y, n_classes, criterion, max_features, rng):
    tree = _CartTree()
    root = tree.new_node()
    stack = [(root, np.arange(bins.codes.shape[0]))]
    n_feat = bins.codes.shape[1]
    k_feat = max(1, int(round(max_features * n_feat)))
    while stack:
        node_id, rows = stack.pop()
        y_node = y[rows]
        if n_classes:
            counts = np.bincount(y_node, minlength=n_classes)
            if rows.size < 2 or counts.max() == rows.size:
                tree.leaf_value[node_id] = counts / rows.size
                continue
        else:
            if rows.size < 2 or np.ptp(y_node) == 0.0:
                tree.leaf_value[node_id] = float(y_node.mean())
                continue
        feats = np.sort(rng.choice(n_feat, size=k_feat, replace=False))
        if n_classes:
            dec, feat, thr = _class_split(bins, rows, feats, y, n_classes, criterion)
        else:
            dec, feat, thr = _reg_split(bins, rows, feats, y)
        if feat < 0 or dec <= 0.0:
            if n_classes:
                tree.leaf_value[node_id] = counts / rows.size
            else:
                tree.leaf_value[node_id] = float(y_node.mean())
            continue
        k = int(np.searchsorted(bins.thresholds[feat], thr, side="left"))
        go_left = bins.codes[rows, feat] <= k
        lid, rid = tree.new_node(), tree.new_node()
        tree.feature[node_id] = feat
        tree.threshold[node_id] = thr
        tree.left[node_id] = lid
        tree.right[node_id] = rid
        stack.append((rid, rows[~go_left]))
        stack.append((lid, rows[go_left]))
    return tree


class Forest:
    """Fitted bagged ensemble; predictions average the trees."""

    def __init__(self, task, n_classes, trees):
        self.task = task
        self.n_classes = n_classes
        self.trees = trees

    @property
    def n_trees(self) -> int:
        return len(self.trees)

    def predict(self, X: np.ndarray) -> np.ndarray:
        if self.task == "regression":
            acc = np.zeros(X.shape[0])
            for tree in self.trees:
                acc += tree.predict(X, 0)
            return acc / len(self.trees)
        acc = np.zeros((X.shape[0], self.n_classes))
        for tree in self.trees:
            acc += tree.predict(X, self.n_classes)
        acc /= len(self.trees)
        # guard against all-zero rows from degenerate leaves
        norm = acc.sum(axis=1, keepdims=True)
        with np.errstate(invalid="ignore"):
            return np.where(norm > 0, acc / norm, 1.0 / self.n_classes)


def train_rf(
    config: dict, X: np.ndarray, y: np.ndarray, task: str, n_classes: int, seed: int
) -> Forest:
    tree_num = int(config["tree_num"])
    max_features = float(config["max_features_fraction"])
    criterion = config.get("split_criterion", "gini")
    rng = np.random.default_rng(seed)
    bins = bin_features(X)
    n = X.shape[0]
    y_fit = y if task == "regression" else y.astype(np.int64)
    trees = []
    for _ in range(tree_num):
        boot = rng.integers(0, n, n)
        boot_bins = Bins(
            codes=bins.codes[boot], thresholds=bins.thresholds,
            nb=bins.nb, th_len=bins.th_len,
        )
        tree = _grow_cart(boot_bins, y_fit[boot], n_classes, criterion, max_features, rng)
        trees.append(tree)
    return Forest(task, n_classes, trees)
