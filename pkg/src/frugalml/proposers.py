"""Resampling choice and the grow-sample-vs-new-config branch.

Cross-validation is worth its cost only on small problems with room in the
budget; past either threshold the search uses a holdout split. Once a
learner is running, each of its turns either re-runs the incumbent
configuration on a geometrically larger sample (when improving in place
looks pricier than just adding data) or asks the local search for a new
configuration at the current size.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .dataset import ResamplingPlan
from .eci import LearnerState, eci1, eci2

__all__ = [
    "BudgetContext",
    "Step",
    "choose_resampling",
    "choose_step",
    "next_sample_size",
    "initial_sample_size",
    "INSTANCE_THRESHOLD",
    "RATE_THRESHOLD_PER_HOUR",
    "DEFAULT_MIN_SAMPLE",
    "DEFAULT_SAMPLE_FACTOR",
]

INSTANCE_THRESHOLD = 100_000
RATE_THRESHOLD_PER_HOUR = 10_000_000.0
DEFAULT_MIN_SAMPLE = 10_000
DEFAULT_SAMPLE_FACTOR = 2.0
CV_FOLDS = 5
HOLDOUT_RATIO = 0.1


@dataclass(frozen=True)
class BudgetContext:
    budget_secs: float
    n_instances: int
    n_features: int

    def __post_init__(self) -> None:
        if self.budget_secs <= 0 or self.n_instances <= 0 or self.n_features <= 0:
            raise ValueError("budget, instances and features must all be positive")


class Step(Enum):
    INCREASE_SAMPLE = "increase_sample"
    NEW_CONFIG = "new_config"


def choose_resampling(ctx: BudgetContext) -> ResamplingPlan:
    """cv(5) for small data with a roomy budget, holdout(0.1) otherwise.

    Both comparisons are strict: a dataset of exactly 100K instances, or a
    workload of exactly 10M cell-rows per budget-hour, already gets holdout.
    """
    budget_hours = ctx.budget_secs / 3600.0
    rate = (ctx.n_instances * ctx.n_features) / budget_hours
    if ctx.n_instances < INSTANCE_THRESHOLD and rate < RATE_THRESHOLD_PER_HOUR:
        return ResamplingPlan("cv", k=CV_FOLDS)
    return ResamplingPlan("holdout", rho=HOLDOUT_RATIO)


def initial_sample_size(full_size: int, min_sample: int = DEFAULT_MIN_SAMPLE) -> int:
    return min(int(min_sample), int(full_size))


def choose_step(
    state: LearnerState, c: float, full_size: int
) -> Step:
    """Grow the sample when improving at this size looks at least as costly."""
    if not state.tried:
        raise ValueError("choose_step needs a learner with at least one trial")
    if state.sample_size < full_size and eci1(state) >= eci2(state, c, full_size):
        return Step.INCREASE_SAMPLE
    return Step.NEW_CONFIG


def next_sample_size(state: LearnerState, c: float, full_size: int) -> int:
    """Geometric escalation, capped at the full data size."""
    grown = max(state.sample_size + 1, int(state.sample_size * c))
    return min(grown, int(full_size))
