"""Per-learner cost bookkeeping and estimated-cost-for-improvement (ECI).

Each learner keeps three cost checkpoints: ``k0`` (total cost spent so
far), ``k1`` and ``k2`` (totals at the two most recent times its own best
error improved), plus the error reduction ``delta`` between those two best
configs. From them:

* ``eci1`` estimates the cost to improve again at the current sample size:
  improvements get more expensive as the search matures, so it is the
  larger of the last two improvement gaps.
* ``eci2`` estimates the cost of re-running the incumbent configuration at
  a sample size grown by the factor ``c``; cost is near-linear in sample
  size, so that is ``c`` times the incumbent's latest trial cost. At the
  full data size there is nothing left to grow, so ``eci2`` is infinite.
* ``eci`` folds in the error gap to the best learner: closing a gap of
  ``g`` at an observed improvement efficiency ``v = delta / tau`` costs
  about ``g / v``, doubled because improvement has diminishing returns.

Learner selection draws proportionally to ``1 / eci``, so the expected ECI
of the draw is the harmonic mean of the active ECIs: cheap improvements
dominate while every non-converged learner keeps a nonzero chance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .localsearch import LocalSearchState

__all__ = [
    "LearnerState",
    "EciEstimate",
    "eci1",
    "eci2",
    "eci",
    "bootstrap_untried",
    "record_trial",
    "inverse_cost_weights",
    "expected_cost",
    "sample_learner",
    "DEFAULT_GAP_FACTOR",
    "ECI_FLOOR",
]

DEFAULT_GAP_FACTOR = 2.0
ECI_FLOOR = 1e-6  # seconds; guards inversion of a zero estimate


class EciError(ValueError):
    """Raised when an estimate is requested from an unusable state."""


@dataclass
class LearnerState:
    """Bookkeeping for one learner across the whole search."""

    name: str
    cost_constant: float
    local: LocalSearchState | None = None
    k0: float = 0.0
    k1: float = 0.0
    k2: float = 0.0
    delta: float = 0.0
    best_error: float = math.inf
    last_cost: float = 0.0
    sample_size: int = 0
    tried: bool = False
    bootstrap_eci1: float | None = None
    # error of the local-search center since the last restart; the learner's
    # best_error never resets, this does
    incumbent_error: float = math.inf
    convergence_count: int = 0
    exhausted: bool = False


@dataclass(frozen=True)
class EciEstimate:
    eci1: float
    eci2: float
    eci: float
    v: float
    tau: float


def eci1(state: LearnerState) -> float:
    """Cost estimate for the next improvement at the current sample size."""
    if not state.tried:
        if state.bootstrap_eci1 is not None:
            return state.bootstrap_eci1
        raise EciError(f"learner {state.name!r} untried and not bootstrapped")
    return max(state.k0 - state.k1, state.k1 - state.k2)


def eci2(state: LearnerState, c: float, full_size: int) -> float:
    """Cost estimate for retrying the incumbent at c times the sample size."""
    if state.sample_size >= full_size:
        return math.inf
    return c * state.last_cost


def eci(
    state: LearnerState,
    best_error_overall: float,
    c: float,
    full_size: int,
    gap_factor: float = DEFAULT_GAP_FACTOR,
) -> EciEstimate:
    """Full estimate for beating the overall best error with this learner."""
    if not state.tried:
        boot = eci1(state)
        return EciEstimate(eci1=boot, eci2=math.inf, eci=boot, v=math.nan, tau=0.0)
    e1 = eci1(state)
    e2 = eci2(state, c, full_size)
    delta = state.delta
    tau = state.k0 - state.k2
    if delta == 0.0:
        # the learner's first configuration is still its best
        delta = state.best_error
        tau = state.k0
    v = delta / tau if tau > 0 else math.inf
    gap = max(0.0, state.best_error - best_error_overall)
    if gap > 0.0 and v > 0.0 and math.isfinite(v):
        gap_cost = gap_factor * gap / v
    else:
        gap_cost = 0.0
    return EciEstimate(eci1=e1, eci2=e2, eci=max(gap_cost, min(e1, e2)), v=v, tau=tau)


def bootstrap_untried(states: dict[str, LearnerState], fastest_smallest_cost: float) -> None:
    """Seed untried learners' eci1 as multiples of the fastest learner's
    first trial cost, using their calibration constants."""
    if fastest_smallest_cost <= 0:
        raise EciError("bootstrap requires a completed first trial with positive cost")
    for state in states.values():
        if not state.tried:
            state.bootstrap_eci1 = state.cost_constant * fastest_smallest_cost


def record_trial(state: LearnerState, cost: float, error: float) -> bool:
    """Fold one finished trial into the checkpoints.

    Returns True when the trial strictly improved the learner's own best
    error, which is when the (k1, k2, delta) checkpoints shift.
    """
    state.k0 += cost
    first = not state.tried
    state.tried = True
    if error < state.best_error:
        old_best = state.best_error
        state.k2 = state.k1
        state.k1 = state.k0
        state.delta = 0.0 if first else old_best - error
        state.best_error = error
        return True
    return False


def inverse_cost_weights(ecis: list[float]) -> np.ndarray:
    """Selection probabilities proportional to 1 / eci (floored)."""
    inv = np.array([1.0 / max(e, ECI_FLOOR) for e in ecis])
    return inv / inv.sum()


def expected_cost(ecis: list[float]) -> float:
    """E[ECI] under inverse-cost sampling: the harmonic mean of the ECIs."""
    return len(ecis) / sum(1.0 / e for e in ecis)


def sample_learner(
    states: dict[str, LearnerState],
    best_error_overall: float,
    c: float,
    full_size: int,
    rng: np.random.Generator,
    gap_factor: float = DEFAULT_GAP_FACTOR,
) -> tuple[str, dict[str, EciEstimate]]:
    """Draw the next learner proportionally to 1 / ECI.

    Learners whose local search has converged (with no restart allowance
    left) are excluded; raises when none remain.
    """
    active = [s for s in states.values() if not s.exhausted]
    if not active:
        raise EciError("all learners have converged")
    estimates = {
        s.name: eci(s, best_error_overall, c, full_size, gap_factor) for s in active
    }
    weights = inverse_cost_weights([estimates[s.name].eci for s in active])
    idx = int(rng.choice(len(active), p=weights))
    return active[idx].name, estimates
