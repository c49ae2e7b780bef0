"""Learner contract and the built-in desk-scale learners.

A learner is registered under a name with a trainer callable, a search
space builder, a relative cost constant (its smallest-trial cost as a
multiple of the fastest learner's) and the tasks it supports. Three come
built in: gradient-boosted trees (``gbt``), a random forest (``rf``) and an
L2-regularized linear model (``lr``). Custom learners register through
:func:`register_learner` with the same signature as the built-ins.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..dataset import Dataset
from ..metrics import compute_error
from ..space import SearchSpace, default_space
from .boosting import train_gbt
from .forest import train_rf
from .linear import train_linear

__all__ = [
    "LearnerSpec",
    "Model",
    "LearnerError",
    "register_learner",
    "get_learner",
    "learner_names",
    "learners_for_task",
    "train",
    "predict",
    "evaluate",
]


class LearnerError(ValueError):
    """Raised for configs outside the domain or shape mismatches."""


@dataclass(frozen=True)
class LearnerSpec:
    """Name plus everything the search needs to drive one learner."""

    name: str
    trainer: Callable
    space_builder: Callable[[int], SearchSpace]
    cost_constant: float
    supports: frozenset[str]

    def __post_init__(self) -> None:
        if self.cost_constant <= 0:
            raise LearnerError("cost_constant must be positive")

    def build_space(self, n_instances: int) -> SearchSpace:
        return self.space_builder(n_instances)


@dataclass(frozen=True)
class Model:
    """A fitted learner with the metadata prediction needs."""

    learner: str
    predictor: object
    task: str
    n_features: int
    n_classes: int
    train_size: int


_REGISTRY: dict[str, LearnerSpec] = {}


def register_learner(
    name: str,
    trainer: Callable,
    space_builder: Callable[[int], SearchSpace],
    cost_constant: float,
    supports: set[str] | frozenset[str],
) -> None:
    """Register a learner; the trainer signature is
    ``trainer(config, X, y, task, n_classes, seed) -> predictor``."""
    _REGISTRY[name] = LearnerSpec(
        name=name,
        trainer=trainer,
        space_builder=space_builder,
        cost_constant=float(cost_constant),
        supports=frozenset(supports),
    )


def get_learner(name: str) -> LearnerSpec:
    try:
        return _REGISTRY[name]
    except KeyError:
        raise LearnerError(f"unknown learner {name!r}; known: {learner_names()}") from None


def learner_names() -> list[str]:
    return sorted(_REGISTRY)


def learners_for_task(task: str, names: list[str] | None = None) -> list[LearnerSpec]:
    pool = [_REGISTRY[n] for n in sorted(_REGISTRY)] if names is None else [get_learner(n) for n in names]
    specs = [s for s in pool if task in s.supports]
    if not specs:
        raise LearnerError(f"no registered learner supports task {task!r}")
    return specs


def train(
    spec: LearnerSpec,
    config: dict,
    data: Dataset,
    seed: int = 0,
    space: SearchSpace | None = None,
) -> Model:
    """Fit one configuration on one dataset; deterministic given the seed."""
    if data.task not in spec.supports:
        raise LearnerError(f"{spec.name} does not support task {data.task!r}")
    if data.n_instances == 0:
        raise LearnerError("cannot train on an empty dataset")
    check_space = space if space is not None else spec.build_space(data.n_instances)
    if not check_space.contains(config):
        raise LearnerError(f"config {config!r} outside the {spec.name} domain")
    predictor = spec.trainer(
        config, data.features, data.labels, data.task, data.n_classes, int(seed)
    )
    return Model(
        learner=spec.name,
        predictor=predictor,
        task=data.task,
        n_features=data.n_features,
        n_classes=data.n_classes,
        train_size=data.n_instances,
    )


def predict(model: Model, features: np.ndarray) -> np.ndarray:
    """Class-probability rows for classification, values for regression."""
    features = np.asarray(features, dtype=float)
    if features.ndim != 2:
        raise LearnerError("features must be a 2-d matrix")
    if features.shape[1] != model.n_features:
        raise LearnerError(
            f"model expects {model.n_features} columns, got {features.shape[1]}"
        )
    if features.shape[0] == 0:
        if model.task == "regression":
            return np.empty(0)
        return np.empty((0, model.n_classes))
    return model.predictor.predict(features)


def evaluate(
    spec: LearnerSpec,
    config: dict,
    splits: list[tuple[Dataset, Dataset]],
    metric: str,
    seed: int = 0,
    space: SearchSpace | None = None,
) -> tuple[float, float]:
    """Run one trial over the given (train, validation) pairs.

    Returns the mean validation error across pairs and the wall-clock cost
    of all training and prediction work.
    """
    start = time.perf_counter()
    errors = []
    for train_part, val_part in splits:
        model = train(spec, config, train_part, seed=seed, space=space)
        preds = predict(model, val_part.features)
        errors.append(compute_error(metric, preds, val_part.labels))
    cost = time.perf_counter() - start
    return float(np.mean(errors)), cost


register_learner("gbt", train_gbt, lambda s: default_space("gbt", s), 1.0,
                 {"binary", "multiclass", "regression"})
register_learner("rf", train_rf, lambda s: default_space("rf", s), 2.0,
                 {"binary", "multiclass", "regression"})
register_learner("lr", train_linear, lambda s: default_space("lr", s), 160.0,
                 {"binary", "multiclass", "regression"})
