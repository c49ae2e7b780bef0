"""The search engine: one resampling decision, then a loop of
learner sampling, sample-vs-config proposals, trial execution and state
updates until the budget runs out or every learner has converged.

The loop is the same for real training and surrogate landscapes; only the
trial runner differs. Real mode measures wall-clock trial costs; surrogate
mode advances a synthetic clock by each trial's declared cost, which makes
whole searches reproducible byte for byte.

Scheduling work per iteration is bounded by the number of learners plus
the dimensionality of the chosen learner's space; nothing scans the trial
history, so overhead stays flat no matter how long the search runs.
"""

from __future__ import annotations

import json
import logging
import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import eci as eci_mod
from . import learners as learners_mod
from . import localsearch
from .dataset import Dataset, ResamplingPlan, ShuffledView, prefix, shuffle, split
from .eci import LearnerState
from .metrics import default_metric
from .proposers import (
    DEFAULT_MIN_SAMPLE,
    DEFAULT_SAMPLE_FACTOR,
    BudgetContext,
    Step,
    choose_resampling,
    choose_step,
    initial_sample_size,
    next_sample_size,
)
from .space import SearchSpace, Dimension, apply_overrides
from .surrogate import SurrogateLandscape

__all__ = [
    "LearningConfiguration",
    "TrialRecord",
    "FitResult",
    "FitError",
    "fit",
    "surrogate_fit",
    "predict",
    "write_log",
    "read_log",
]

logger = logging.getLogger(__name__)

MAX_CONVERGENCES = 2  # one automatic restart cycle per learner


class FitError(ValueError):
    """Raised for unusable fit inputs."""


class LogFormatError(ValueError):
    """Raised when a trial log line cannot be parsed."""


@dataclass(frozen=True)
class LearningConfiguration:
    """One trial's full identity: learner, hyperparameters, sample size,
    resampling strategy."""

    learner: str
    h: dict
    s: int
    r: ResamplingPlan


@dataclass(frozen=True)
class TrialRecord:
    index: int
    elapsed_at_finish: float
    learner: str
    config: dict
    sample_size: int
    resample: str
    validation_error: float
    cost: float
    improved: bool
    eci1: float | None = None
    eci2: float | None = None
    eci: float | None = None
    test_error: float | None = None


@dataclass
class FitResult:
    best_config: LearningConfiguration
    best_model: learners_mod.Model | None
    best_validation_error: float
    trials: list[TrialRecord]
    plan: ResamplingPlan
    metric: str | None = None

    def anytime_curve(self) -> list[tuple[float, float]]:
        curve = []
        best = math.inf
        for t in self.trials:
            best = min(best, t.validation_error)
            curve.append((t.elapsed_at_finish, best))
        return curve


# ---------------------------------------------------------------------------
# trial runners


class _RealRunner:
    """Executes trials by training registered learners on data prefixes."""

    synthetic = False

    def __init__(self, data: Dataset, specs, metric: str, shuffle_seed: int):
        self.data = data
        self.view: ShuffledView = shuffle(data, shuffle_seed)
        self.specs = {s.name: s for s in specs}
        self.metric = metric
        self.full_size = data.n_instances
        self.n_features = data.n_features
        self.names = [s.name for s in sorted(specs, key=lambda s: (s.cost_constant, s.name))]
        self.spaces: dict[str, SearchSpace] = {}

    def space_for(self, name: str) -> SearchSpace:
        if name not in self.spaces:
            self.spaces[name] = self.specs[name].build_space(self.full_size)
        return self.spaces[name]

    def cost_constant(self, name: str) -> float:
        return self.specs[name].cost_constant

    def run(self, name, assignment, sample_size, plan, seed):
        sample = prefix(self.view, sample_size)
        splits = split(sample, plan, seed=None)
        return learners_mod.evaluate(
            self.specs[name], assignment, splits, self.metric,
            seed=seed, space=self.space_for(name),
        )


class _SurrogateRunner:
    """Executes trials by querying a synthetic landscape."""

    synthetic = True

    def __init__(self, landscape: SurrogateLandscape):
        self.landscape = landscape
        self.full_size = landscape.full_size
        self.n_features = landscape.n_features
        self.names = [
            a.name for a in sorted(landscape.arms, key=lambda a: (a.unit_cost, a.name))
        ]
        self.spaces = {a.name: _unit_space(a) for a in landscape.arms}

    def space_for(self, name: str) -> SearchSpace:
        return self.spaces[name]

    def cost_constant(self, name: str) -> float:
        return self.landscape.cost_constant(name)

    def run(self, name, assignment, sample_size, plan, seed):
        space = self.spaces[name]
        x = np.array([assignment[d.name] for d in space.dims])
        return self.landscape.evaluate(name, x, sample_size, plan)


def _unit_space(arm) -> SearchSpace:
    dims = [
        Dimension(f"x{i}", "float", 0.0, 1.0, scale="linear")
        for i in range(arm.d - 1)
    ]
    dims.append(Dimension("complexity", "float", 0.0, 1.0, scale="linear", cost_related=True))
    names = [d.name for d in dims]
    return SearchSpace(dims=tuple(dims), init=dict(zip(names, arm.init)))


# ---------------------------------------------------------------------------
# search options and core loop


@dataclass
class _Options:
    seed: int = 0
    resample: str = "auto"  # auto | cv | holdout
    min_sample: int = DEFAULT_MIN_SAMPLE
    sample_factor: float = DEFAULT_SAMPLE_FACTOR
    gap_factor: float = eci_mod.DEFAULT_GAP_FACTOR
    max_trials: int | None = None
    learner_policy: str = "eci"  # eci | roundrobin | random
    sample_policy: str = "adaptive"  # adaptive | full

    def __post_init__(self) -> None:
        if self.resample not in ("auto", "cv", "holdout"):
            raise FitError(f"unknown resample override {self.resample!r}")
        if self.learner_policy not in ("eci", "roundrobin", "random"):
            raise FitError(f"unknown learner policy {self.learner_policy!r}")
        if self.sample_policy not in ("adaptive", "full"):
            raise FitError(f"unknown sample policy {self.sample_policy!r}")
        if self.sample_factor <= 1.0:
            raise FitError("sample_factor must exceed 1")
        if self.min_sample < 1:
            raise FitError("min_sample must be positive")


def _seed_children(seed: int):
    """One root generator, per-consumer substreams: shuffle, learner
    sampling, local-search directions, training seeds."""
    return np.random.SeedSequence(seed).spawn(4)


def _resolve_plan(opt: _Options, budget: float, runner) -> ResamplingPlan:
    if opt.resample == "cv":
        return ResamplingPlan("cv")
    if opt.resample == "holdout":
        return ResamplingPlan("holdout")
    return choose_resampling(
        BudgetContext(budget, runner.full_size, max(1, runner.n_features))
    )


def _run_search(runner, budget: float, opt: _Options):
    if budget <= 0:
        raise FitError("budget must be positive")
    plan = _resolve_plan(opt, budget, runner)
    # cv evaluates every fold, so it only ever runs on the full data; the
    # fulldata policy pins the sample size by definition
    pin_full = plan.kind == "cv" or opt.sample_policy == "full"
    full = runner.full_size
    s0 = full if pin_full else initial_sample_size(full, opt.min_sample)
    c = opt.sample_factor

    ss_sampler, ss_local, ss_train = _seed_children(opt.seed)[1:]
    sampler_rng = np.random.default_rng(ss_sampler)
    train_rng = np.random.default_rng(ss_train)
    local_seeds = ss_local.spawn(len(runner.names))

    states: dict[str, LearnerState] = {}
    for i, name in enumerate(runner.names):
        space = runner.space_for(name)
        local = localsearch.LocalSearchState(
            center=space.init_unit(), rng=np.random.default_rng(local_seeds[i])
        )
        localsearch.set_adjustment_enabled(local, s0 >= full)
        states[name] = LearnerState(
            name=name,
            cost_constant=runner.cost_constant(name),
            local=local,
            sample_size=s0,
        )

    clock_start = time.monotonic()
    synthetic_elapsed = 0.0

    def elapsed() -> float:
        return synthetic_elapsed if runner.synthetic else time.monotonic() - clock_start

    trials: list[TrialRecord] = []
    best_error = math.inf
    best_config: LearningConfiguration | None = None
    rr_cursor = 0

    while True:
        if trials and elapsed() >= budget:
            break
        if opt.max_trials is not None and len(trials) >= opt.max_trials:
            break

        estimates = None
        if not trials:
            name = runner.names[0]  # lowest cost constant goes first
        else:
            active = [n for n in runner.names if not states[n].exhausted]
            if not active:
                break
            if opt.learner_policy == "eci":
                try:
                    name, estimates = eci_mod.sample_learner(
                        states, best_error, c, full, sampler_rng, opt.gap_factor
                    )
                except eci_mod.EciError:
                    break
            elif opt.learner_policy == "roundrobin":
                name = active[rr_cursor % len(active)]
                rr_cursor += 1
            else:
                name = active[int(sampler_rng.integers(len(active)))]

        state = states[name]
        space = runner.space_for(name)

        if state.local.converged:
            # restart allowance was checked when convergence was counted
            localsearch.restart(state.local)
            state.incumbent_error = math.inf
            if not pin_full:
                state.sample_size = initial_sample_size(full, opt.min_sample)
            localsearch.set_adjustment_enabled(state.local, state.sample_size >= full)

        if state.tried and choose_step(state, c, full) is Step.INCREASE_SAMPLE:
            state.sample_size = next_sample_size(state, c, full)
            localsearch.set_adjustment_enabled(state.local, state.sample_size >= full)
            candidate = None
            assignment = space.from_unit(state.local.center)
        else:
            candidate = localsearch.propose(state.local)
            assignment = space.from_unit(candidate)

        train_seed = int(train_rng.integers(2**31 - 1))
        error, cost = runner.run(name, assignment, state.sample_size, plan, train_seed)
        synthetic_elapsed += cost

        if candidate is None:
            state.last_cost = cost
            if error < state.incumbent_error:
                state.incumbent_error = error
        else:
            improved_local = error < state.incumbent_error
            localsearch.report(state.local, candidate, improved_local)
            if improved_local:
                state.incumbent_error = error
                state.last_cost = cost
            if state.local.converged:
                state.convergence_count += 1
                if state.convergence_count >= MAX_CONVERGENCES:
                    state.exhausted = True
        eci_mod.record_trial(state, cost, error)

        improved_global = error < best_error
        if improved_global:
            best_error = error
            best_config = LearningConfiguration(
                learner=name, h=dict(assignment), s=state.sample_size, r=plan
            )
        est = estimates.get(name) if estimates else None
        trials.append(
            TrialRecord(
                index=len(trials) + 1,
                elapsed_at_finish=elapsed(),
                learner=name,
                config=dict(assignment),
                sample_size=state.sample_size,
                resample=plan.describe(),
                validation_error=error,
                cost=cost,
                improved=improved_global,
                eci1=est.eci1 if est else None,
                eci2=est.eci2 if est else None,
                eci=est.eci if est else None,
            )
        )
        if len(trials) == 1:
            eci_mod.bootstrap_untried(states, cost)

    if len(trials) == 1 and elapsed() >= budget:
        logger.warning(
            "budget %.3gs allowed only the initial %s trial; returning its model",
            budget, trials[0].learner,
        )
    assert best_config is not None
    return trials, best_config, best_error, plan


def fit(
    data: Dataset,
    budget_secs: float,
    metric: str | None = None,
    learners: list[str] | None = None,
    seed: int = 0,
    resample: str = "auto",
    min_sample: int = DEFAULT_MIN_SAMPLE,
    sample_factor: float = DEFAULT_SAMPLE_FACTOR,
    gap_factor: float = eci_mod.DEFAULT_GAP_FACTOR,
    max_trials: int | None = None,
    learner_policy: str = "eci",
    sample_policy: str = "adaptive",
    space_overrides: dict | None = None,
) -> FitResult:
    """Search for the best learning configuration within the budget.

    The returned result carries the trial log, the best configuration and
    a model retrained at that configuration on all of ``data``.
    """
    if data.n_instances == 0:
        raise FitError("dataset is empty")
    metric = metric or default_metric(data.task)
    specs = learners_mod.learners_for_task(data.task, learners)
    opt = _Options(
        seed=seed, resample=resample, min_sample=min_sample,
        sample_factor=sample_factor, gap_factor=gap_factor, max_trials=max_trials,
        learner_policy=learner_policy, sample_policy=sample_policy,
    )
    shuffle_seed = int(_seed_children(seed)[0].generate_state(1)[0])
    runner = _RealRunner(data, specs, metric, shuffle_seed)
    if space_overrides:
        for lname, ov in space_overrides.items():
            if lname in runner.specs:
                runner.spaces[lname] = apply_overrides(runner.space_for(lname), ov)
    trials, best_config, best_error, plan = _run_search(runner, budget_secs, opt)
    best_model = learners_mod.train(
        runner.specs[best_config.learner],
        best_config.h,
        data,
        seed=seed,
        space=runner.space_for(best_config.learner),
    )
    return FitResult(
        best_config=best_config,
        best_model=best_model,
        best_validation_error=best_error,
        trials=trials,
        plan=plan,
        metric=metric,
    )


def surrogate_fit(
    landscape: SurrogateLandscape,
    budget: float,
    seed: int = 0,
    resample: str = "auto",
    min_sample: int = DEFAULT_MIN_SAMPLE,
    sample_factor: float = DEFAULT_SAMPLE_FACTOR,
    gap_factor: float = eci_mod.DEFAULT_GAP_FACTOR,
    max_trials: int | None = None,
    learner_policy: str = "eci",
    sample_policy: str = "adaptive",
) -> FitResult:
    """Run the same search against a synthetic landscape.

    Costs and the elapsed clock are the landscape's declared values, so
    identical arguments give identical results. No model is produced.
    """
    opt = _Options(
        seed=seed, resample=resample, min_sample=min_sample,
        sample_factor=sample_factor, gap_factor=gap_factor, max_trials=max_trials,
        learner_policy=learner_policy, sample_policy=sample_policy,
    )
    runner = _SurrogateRunner(landscape)
    trials, best_config, best_error, plan = _run_search(runner, budget, opt)
    return FitResult(
        best_config=best_config,
        best_model=None,
        best_validation_error=best_error,
        trials=trials,
        plan=plan,
        metric=None,
    )


def predict(result: FitResult, features) -> np.ndarray:
    """Predictions of the best model found by fit."""
    if result.best_model is None:
        raise FitError("this result has no trained model (surrogate search)")
    return learners_mod.predict(result.best_model, features)


# ---------------------------------------------------------------------------
# trial log serialization


def write_log(trials: list[TrialRecord], path: str | Path) -> None:
    """One JSON object per line, fixed key order for diff stability."""
    path = Path(path)
    with path.open("w") as fh:
        for t in trials:
            obj = {
                "iter": t.index,
                "time": t.elapsed_at_finish,
                "learner": t.learner,
                "config": t.config,
                "sample_size": t.sample_size,
                "resample": t.resample,
                "error": t.validation_error,
                "cost": t.cost,
                "improved": t.improved,
                "eci1": t.eci1,
                "eci2": t.eci2,
                "eci": t.eci,
            }
            if t.test_error is not None:
                obj["test_error"] = t.test_error
            fh.write(json.dumps(obj) + "\n")


def read_log(path: str | Path) -> list[TrialRecord]:
    path = Path(path)
    trials = []
    with path.open() as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                trials.append(
                    TrialRecord(
                        index=obj["iter"],
                        elapsed_at_finish=obj["time"],
                        learner=obj["learner"],
                        config=obj["config"],
                        sample_size=obj["sample_size"],
                        resample=obj["resample"],
                        validation_error=obj["error"],
                        cost=obj["cost"],
                        improved=obj["improved"],
                        eci1=obj.get("eci1"),
                        eci2=obj.get("eci2"),
                        eci=obj.get("eci"),
                        test_error=obj.get("test_error"),
                    )
                )
            except (json.JSONDecodeError, KeyError) as exc:
                raise LogFormatError(f"{path}: line {lineno}: {exc}") from None
    return trials
