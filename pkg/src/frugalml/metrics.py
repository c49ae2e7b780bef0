"""Error metrics, all oriented so that lower is better.

Classification metrics take probability predictions: a vector of
positive-class probabilities (or an (n, 2) matrix) for binary tasks, an
(n, k) matrix for multiclass. Regression metrics take real-valued vectors.
Custom metrics register through :func:`register_metric` as
``(predictions, labels) -> value`` callables.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

__all__ = [
    "compute_error",
    "register_metric",
    "available_metrics",
    "default_metric",
    "one_minus_auc",
    "log_loss",
    "one_minus_r2",
    "mse",
    "qerror_p95",
]

_PROB_CLAMP = 1e-15  # numeric guard for log of predicted probabilities
_QERROR_FLOOR = 1.0  # selectivity convention: estimates and truths below 1 count as 1


class MetricError(ValueError):
    """Raised for inputs a metric cannot score."""


def _as_1d(values) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    return arr.reshape(-1) if arr.ndim != 1 else arr


def _positive_scores(predictions) -> np.ndarray:
    arr = np.asarray(predictions, dtype=float)
    if arr.ndim == 2:
        if arr.shape[1] != 2:
            raise MetricError("binary metric expects a vector or an (n, 2) matrix")
        return arr[:, 1]
    return _as_1d(arr)


def one_minus_auc(predictions, labels) -> float:
    """1 - AUC(ROC), computed from average ranks so ties are handled."""
    scores = _positive_scores(predictions)
    y = _as_1d(labels)
    if scores.shape[0] != y.shape[0]:
        raise MetricError("predictions and labels differ in length")
    if scores.shape[0] == 0:
        raise MetricError("empty input")
    n_pos = int(np.sum(y == 1))
    n_neg = int(np.sum(y == 0))
    if n_pos == 0 or n_neg == 0:
        raise MetricError("AUC needs both classes present")
    order = np.argsort(scores, kind="mergesort")
    ranks = np.empty_like(order, dtype=float)
    ranks[order] = np.arange(1, len(scores) + 1)
    # average ranks within tied groups
    sorted_scores = scores[order]
    i = 0
    while i < len(sorted_scores):
        j = i
        while j + 1 < len(sorted_scores) and sorted_scores[j + 1] == sorted_scores[i]:
            j += 1
        if j > i:
            ranks[order[i : j + 1]] = 0.5 * (i + 1 + j + 1)
        i = j + 1
    auc = (ranks[y == 1].sum() - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)
    return float(1.0 - auc)


def log_loss(predictions, labels) -> float:
    """Mean negative log of the clamped true-class probability."""
    y = np.asarray(labels)
    arr = np.asarray(predictions, dtype=float)
    if arr.shape[0] != y.shape[0]:
        raise MetricError("predictions and labels differ in length")
    if arr.shape[0] == 0:
        raise MetricError("empty input")
    if arr.ndim == 2:
        idx = y.astype(int)
        if idx.min() < 0 or idx.max() >= arr.shape[1]:
            raise MetricError("label outside prediction columns")
        p_true = arr[np.arange(arr.shape[0]), idx]
    else:
        yb = y.astype(float)
        p1 = _as_1d(arr)
        p_true = np.where(yb == 1, p1, 1.0 - p1)
    p_true = np.clip(p_true, _PROB_CLAMP, 1.0 - _PROB_CLAMP)
    return float(-np.mean(np.log(p_true)))


def one_minus_r2(predictions, labels) -> float:
    pred = _as_1d(predictions)
    y = _as_1d(labels)
    if pred.shape[0] != y.shape[0]:
        raise MetricError("predictions and labels differ in length")
    if pred.shape[0] == 0:
        raise MetricError("empty input")
    sst = float(np.sum((y - y.mean()) ** 2))
    if sst == 0.0:
        raise MetricError("labels are constant; r2 undefined")
    sse = float(np.sum((y - pred) ** 2))
    return sse / sst


def mse(predictions, labels) -> float:
    pred = _as_1d(predictions)
    y = _as_1d(labels)
    if pred.shape[0] != y.shape[0]:
        raise MetricError("predictions and labels differ in length")
    if pred.shape[0] == 0:
        raise MetricError("empty input")
    return float(np.mean((pred - y) ** 2))


def _nearest_rank(sorted_values: np.ndarray, q: float) -> float:
    n = len(sorted_values)
    rank = max(1, int(np.ceil(q * n)))
    return float(sorted_values[rank - 1])


def qerror_p95(predictions, labels) -> float:
    """95th-percentile q-error, max(pred/true, true/pred) with a floor of 1."""
    pred = np.maximum(_as_1d(predictions), _QERROR_FLOOR)
    y = np.maximum(_as_1d(labels), _QERROR_FLOOR)
    if pred.shape[0] != y.shape[0]:
        raise MetricError("predictions and labels differ in length")
    if pred.shape[0] == 0:
        raise MetricError("empty input")
    q = np.maximum(pred / y, y / pred)
    return _nearest_rank(np.sort(q), 0.95)


_METRICS: dict[str, Callable] = {
    "one_minus_auc": one_minus_auc,
    "log_loss": log_loss,
    "one_minus_r2": one_minus_r2,
    "mse": mse,
    "qerror_p95": qerror_p95,
}


def register_metric(name: str, fn: Callable) -> None:
    """Register a custom (predictions, labels) -> error callable."""
    if not callable(fn):
        raise MetricError("metric must be callable")
    _METRICS[name] = fn


def available_metrics() -> list[str]:
    return sorted(_METRICS)


def compute_error(metric: str, predictions, labels) -> float:
    try:
        fn = _METRICS[metric]
    except KeyError:
        raise MetricError(f"unknown metric {metric!r}; known: {available_metrics()}") from None
    return float(fn(predictions, labels))


def default_metric(task: str) -> str:
    """Task-appropriate default: rank error for binary, log loss for
    multiclass, 1-r2 for regression."""
    return {
        "binary": "one_minus_auc",
        "multiclass": "log_loss",
        "regression": "one_minus_r2",
    }[task]
