"""Randomized direct search over the unit hypercube.

The search keeps an incumbent point (the best since the last restart) and
proposes moves of a fixed step length along random unit-sphere directions.
A failed direction is retried in the opposite sense before a new one is
drawn. Once failures pile up past a dimension-dependent patience the step
length decays by the observed progress ratio, and when it falls below its
lower bound the search is converged until restarted from a fresh random
point. Step decay and convergence are gated by a flag so the owner can
enable them only when trials run on the full sample size.

The caller owns the notion of "improved": it evaluates each candidate and
reports back a boolean. The very first proposal after construction or a
restart is the center itself, so the incumbent always has a measured error.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["LocalSearchState", "propose", "report", "restart", "set_adjustment_enabled"]

STEPSIZE_SHRINK_FLOOR = 2.0**10  # lower bound = sqrt(d) / this
MIN_REDUCTION_RATIO = 1.1


class SearchStateError(RuntimeError):
    """Raised on out-of-order propose/report/restart calls."""


@dataclass
class LocalSearchState:
    """Mutable direct-search bookkeeping for one learner."""

    center: np.ndarray
    rng: np.random.Generator
    stepsize: float = 0.0
    pending_direction: np.ndarray | None = None
    tried_opposite: bool = False
    last_improved: bool = True
    no_improve_count: int = 0
    iters_since_restart: int = 0
    iter_of_best_since_restart: int = 0
    converged: bool = False
    adjustment_enabled: bool = False
    center_evaluated: bool = False
    awaiting_report: np.ndarray | None = None

    def __post_init__(self) -> None:
        self.center = np.asarray(self.center, dtype=float)
        if self.stepsize <= 0.0:
            self.stepsize = float(np.sqrt(self.d))

    @property
    def d(self) -> int:
        return int(self.center.shape[0])

    @property
    def stepsize_lower_bound(self) -> float:
        return float(np.sqrt(self.d)) / STEPSIZE_SHRINK_FLOOR

    @property
    def patience(self) -> int:
        return 2 ** (self.d - 1)


def _unit_direction(rng: np.random.Generator, d: int) -> np.ndarray:
    while True:
        g = rng.standard_normal(d)
        norm = np.linalg.norm(g)
        if norm > 0:
            return g / norm


def _project(point: np.ndarray) -> np.ndarray:
    return np.clip(point, 0.0, 1.0)


def propose(state: LocalSearchState) -> np.ndarray:
    """Next candidate point; raises if the search has converged."""
    if state.converged:
        raise SearchStateError("propose() called on a converged search")
    if state.awaiting_report is not None:
        raise SearchStateError("propose() called before reporting the last candidate")
    if not state.center_evaluated:
        candidate = state.center.copy()
    elif (
        state.pending_direction is not None
        and not state.tried_opposite
        and not state.last_improved
    ):
        # the forward move failed: retry the same direction reversed
        state.tried_opposite = True
        candidate = _project(state.center - state.stepsize * state.pending_direction)
    else:
        u = _unit_direction(state.rng, state.d)
        state.pending_direction = u
        state.tried_opposite = False
        candidate = _project(state.center + state.stepsize * u)
    state.awaiting_report = candidate
    return candidate


def report(state: LocalSearchState, candidate: np.ndarray, improved: bool) -> None:
    """Record the outcome of the last proposed candidate."""
    if state.awaiting_report is None:
        raise SearchStateError("report() without a matching propose()")
    if not np.array_equal(state.awaiting_report, np.asarray(candidate, dtype=float)):
        raise SearchStateError("report() candidate does not match the last proposal")
    state.awaiting_report = None
    state.iters_since_restart += 1
    was_center_eval = not state.center_evaluated
    state.center_evaluated = True
    state.last_improved = bool(improved)

    if improved:
        state.center = np.asarray(candidate, dtype=float).copy()
        state.pending_direction = None
        state.tried_opposite = False
        state.no_improve_count = 0
        state.iter_of_best_since_restart = state.iters_since_restart
        return
    if was_center_eval:
        # a restart center that fails to beat the previous incumbent still
        # anchors the new epoch; nothing to count against a direction
        return
    if state.pending_direction is not None and not state.tried_opposite:
        # opposite direction still owed; the pair is not finished
        return
    state.pending_direction = None
    state.tried_opposite = False
    state.no_improve_count += 1
    if not state.adjustment_enabled:
        return
    if state.no_improve_count > state.patience:
        # the counter is not reset here: decay repeats on every further
        # failed pair until something improves or the search converges
        ratio = state.iters_since_restart / max(1, state.iter_of_best_since_restart)
        ratio = max(ratio, MIN_REDUCTION_RATIO)
        state.stepsize = state.stepsize / ratio
        if state.stepsize < state.stepsize_lower_bound:
            state.converged = True


def restart(state: LocalSearchState, rng: np.random.Generator | None = None) -> None:
    """Re-seed the search at a uniform random point with a fresh full step."""
    if not state.converged:
        raise SearchStateError("restart() called on a search that has not converged")
    gen = rng if rng is not None else state.rng
    state.center = gen.uniform(0.0, 1.0, state.d)
    state.stepsize = float(np.sqrt(state.d))
    state.pending_direction = None
    state.tried_opposite = False
    state.last_improved = True
    state.no_improve_count = 0
    state.iters_since_restart = 0
    state.iter_of_best_since_restart = 0
    state.converged = False
    state.center_evaluated = False
    state.awaiting_report = None


def set_adjustment_enabled(state: LocalSearchState, enabled: bool) -> None:
    """Gate step decay and convergence; proposals continue either way."""
    state.adjustment_enabled = bool(enabled)
