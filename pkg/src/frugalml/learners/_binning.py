"""Quantile binning and histogram scans shared by the tree learners.

Features are discretized once per training run onto at most 255 quantile
thresholds, so split search scans bin histograms instead of sorted raw
values and trial cost stays near-linear in the row count. The histogram
helper aggregates every requested feature in a single bincount call, which
keeps the per-node constant overhead flat.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MAX_THRESHOLDS = 255


@dataclass(frozen=True)
class Bins:
    codes: np.ndarray  # (n, f): counts of thresholds < value
    thresholds: list[np.ndarray]  # per-feature sorted split values
    nb: int  # padded bin count, max over features
    th_len: np.ndarray  # (f,) candidate split count per feature


def bin_features(X: np.ndarray, max_thresholds: int = MAX_THRESHOLDS) -> Bins:
    """With strict counting, "code <= k" is exactly
    "value <= thresholds[j][k]", which is what the trees store for
    raw-feature prediction."""
    n, f = X.shape
    codes = np.empty((n, f), dtype=np.int16)
    thresholds: list[np.ndarray] = []
    qs = np.linspace(0.0, 1.0, max_thresholds + 2)[1:-1]
    for j in range(f):
        col = X[:, j]
        th = np.unique(np.quantile(col, qs))
        # thresholds at or above the max cannot separate anything
        th = th[th < col.max()] if col.size else th
        thresholds.append(th)
        codes[:, j] = np.searchsorted(th, col, side="left")
    th_len = np.array([len(t) for t in thresholds], dtype=np.int64)
    nb = int(th_len.max()) + 1 if f else 1
    return Bins(codes=codes, thresholds=thresholds, nb=nb, th_len=th_len)


def histograms(bins: Bins, rows: np.ndarray, feats: np.ndarray, weights: list) -> list:
    """Per-feature bin histograms over ``rows``, one aggregated bincount per
    weight vector (``None`` means plain counts). Returns (len(feats), nb)
    arrays."""
    sub = bins.codes[rows][:, feats]
    m, fs = sub.shape
    flat = (sub + (np.arange(fs, dtype=np.int64) * bins.nb)[None, :]).ravel()
    out = []
    for w in weights:
        if w is None:
            hist = np.bincount(flat, minlength=fs * bins.nb).astype(float)
        else:
            hist = np.bincount(flat, weights=np.repeat(w[rows], fs), minlength=fs * bins.nb)
        out.append(hist.reshape(fs, bins.nb))
    return out


def class_histograms(
    bins: Bins, rows: np.ndarray, feats: np.ndarray, y: np.ndarray, n_classes: int
) -> np.ndarray:
    """Per-(feature, bin, class) counts over ``rows`` in one bincount."""
    sub = bins.codes[rows][:, feats]
    m, fs = sub.shape
    block = (sub + (np.arange(fs, dtype=np.int64) * bins.nb)[None, :]) * n_classes
    flat = (block + y[rows][:, None]).ravel()
    hist = np.bincount(flat, minlength=fs * bins.nb * n_classes).astype(float)
    return hist.reshape(fs, bins.nb, n_classes)


def candidate_mask(bins: Bins, feats: np.ndarray) -> np.ndarray:
    """(len(feats), nb-1) mask of real split positions (k < th_len[feat])."""
    ks = np.arange(bins.nb - 1)
    return ks[None, :] < bins.th_len[feats][:, None]
