"""L2-regularized linear models fitted by deterministic full-batch
gradient descent.

Features are standardized internally for optimizer conditioning (the model
stores the scaler, so raw features go in and out). The step size comes
from a trace bound on the loss curvature, which keeps descent stable on
any input without line search.
"""

from __future__ import annotations

import numpy as np

_MAX_ITERS = 200
_GRAD_TOL = 1e-10


def _standardize(X):
    mu = X.mean(axis=0)
    sigma = X.std(axis=0)
    sigma = np.where(sigma > 0, sigma, 1.0)
    return (X - mu) / sigma, mu, sigma


def _sigmoid(z):
    return 1.0 / (1.0 + np.exp(-np.clip(z, -500, 500)))


def _softmax(z):
    z = z - z.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


class LinearModel:
    def __init__(self, task, n_classes, weights, bias, mu, sigma):
        self.task = task
        self.n_classes = n_classes
        self.weights = weights
        self.bias = bias
        self.mu = mu
        self.sigma = sigma

    def predict(self, X: np.ndarray) -> np.ndarray:
        Z = (X - self.mu) / self.sigma
        if self.task == "regression":
            return Z @ self.weights + self.bias
        if self.task == "binary":
            p1 = _sigmoid(Z @ self.weights + self.bias)
            return np.column_stack([1.0 - p1, p1])
        return _softmax(Z @ self.weights + self.bias)


def train_linear(
    config: dict, X: np.ndarray, y: np.ndarray, task: str, n_classes: int, seed: int
) -> LinearModel:
    C = float(config["C"])
    lam = 1.0 / C
    Z, mu, sigma = _standardize(X)
    n, f = Z.shape
    mean_row_sq = float(np.mean(np.sum(Z * Z, axis=1))) if n else 1.0

    if task == "regression":
        w = np.zeros(f)
        b = float(y.mean())
        lip = 2.0 * mean_row_sq + 2.0 * lam
        step = 1.0 / max(lip, 1e-12)
        for _ in range(_MAX_ITERS):
            resid = Z @ w + b - y
            grad_w = 2.0 * (Z.T @ resid) / n + 2.0 * lam * w
            grad_b = 2.0 * resid.mean()
            w -= step * grad_w
            b -= step * grad_b
            if np.abs(grad_w).max(initial=abs(grad_b)) < _GRAD_TOL:
                break
        return LinearModel(task, 0, w, b, mu, sigma)

    if task == "binary":
        yf = y.astype(float)
        w = np.zeros(f)
        b = 0.0
        lip = 0.25 * mean_row_sq + lam
        step = 1.0 / max(lip, 1e-12)
        for _ in range(_MAX_ITERS):
            p = _sigmoid(Z @ w + b)
            err = p - yf
            grad_w = (Z.T @ err) / n + lam * w
            grad_b = err.mean()
            w -= step * grad_w
            b -= step * grad_b
            if np.abs(grad_w).max(initial=abs(grad_b)) < _GRAD_TOL:
                break
        return LinearModel(task, 2, w, b, mu, sigma)

    onehot = np.zeros((n, n_classes))
    onehot[np.arange(n), y.astype(int)] = 1.0
    W = np.zeros((f, n_classes))
    b = np.zeros(n_classes)
    lip = 0.5 * mean_row_sq + lam
    step = 1.0 / max(lip, 1e-12)
    for _ in range(_MAX_ITERS):
        P = _softmax(Z @ W + b)
        err = P - onehot
        grad_W = (Z.T @ err) / n + lam * W
        grad_b = err.mean(axis=0)
        W -= step * grad_W
        b -= step * grad_b
        if np.abs(grad_W).max(initial=float(np.abs(grad_b).max())) < _GRAD_TOL:
            break
    return LinearModel(task, n_classes, W, b, mu, sigma)
