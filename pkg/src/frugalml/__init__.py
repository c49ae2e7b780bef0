"""frugalml: budget-aware learner and hyperparameter search.

The library searches jointly over the learner, its hyperparameters, the
training sample size and the resampling strategy, spending a wall-clock
budget where improvement per second looks cheapest. A deterministic
surrogate mode replays the same scheduler on synthetic landscapes for
reproducible policy studies.

Typical use::

    from frugalml import load_csv, fit, predict

    data = load_csv("train.csv", task="binary", label_column="y")
    result = fit(data, budget_secs=60, seed=0)
    probabilities = predict(result, X_test)
"""

from .controller import (
    FitResult,
    LearningConfiguration,
    TrialRecord,
    fit,
    predict,
    read_log,
    surrogate_fit,
    write_log,
)
from .dataset import Dataset, ResamplingPlan, ShuffledView, load_csv, prefix, shuffle, split
from .learners import Model, register_learner
from .metrics import compute_error, register_metric
from .space import SearchSpace, default_space
from .surrogate import SurrogateLandscape, default_landscape, load_landscape, replay

__version__ = "0.1.0"

__all__ = [
    "Dataset",
    "FitResult",
    "LearningConfiguration",
    "Model",
    "ResamplingPlan",
    "SearchSpace",
    "ShuffledView",
    "SurrogateLandscape",
    "TrialRecord",
    "compute_error",
    "default_landscape",
    "default_space",
    "fit",
    "load_csv",
    "load_landscape",
    "predict",
    "prefix",
    "read_log",
    "register_learner",
    "register_metric",
    "replay",
    "shuffle",
    "split",
    "surrogate_fit",
    "write_log",
]
