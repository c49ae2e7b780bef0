import numpy as np
import pytest

from frugalml.dataset import Dataset


def make_binary(n, seed=0, n_features=6):
    """Binary task with a known nonlinear rule: sign structure of the first
    two features XOR a threshold on the third."""
    rng = np.random.default_rng(seed)
    X = rng.uniform(-1.0, 1.0, (n, n_features))
    rule = ((X[:, 0] * X[:, 1]) > 0) ^ (X[:, 2] > 0.3)
    y = rule.astype(np.int64)
    return Dataset(X, y, "binary")


def make_multiclass(n, seed=0, n_classes=3, n_features=5):
    rng = np.random.default_rng(seed)
    X = rng.uniform(-1.0, 1.0, (n, n_features))
    score = X[:, 0] + 2.0 * X[:, 1] ** 2 - X[:, 2]
    qs = np.quantile(score, np.linspace(0, 1, n_classes + 1)[1:-1])
    y = np.searchsorted(qs, score).astype(np.int64)
    return Dataset(X, y, "multiclass")


def make_regression(n, seed=0, n_features=5):
    rng = np.random.default_rng(seed)
    X = rng.uniform(-1.0, 1.0, (n, n_features))
    y = np.sin(2.0 * X[:, 0]) + X[:, 1] * X[:, 2] + 0.1 * X[:, 3]
    return Dataset(X, y, "regression")


def write_csv(path, data: Dataset, label_name="y"):
    cols = [f"f{i}" for i in range(data.n_features)] + [label_name]
    with open(path, "w") as fh:
        fh.write(",".join(cols) + "\n")
        for row, label in zip(data.features, data.labels):
            cells = [repr(float(v)) for v in row]
            if data.task == "regression":
                cells.append(repr(float(label)))
            else:
                cells.append(str(int(label)))
            fh.write(",".join(cells) + "\n")
    return path


@pytest.fixture
def binary_1k():
    return make_binary(1000, seed=3)


@pytest.fixture
def regression_1k():
    return make_regression(1000, seed=4)
