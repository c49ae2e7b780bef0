"""Deterministic synthetic trial landscapes for scheduler testing.

Each arm maps (config point in the unit cube, sample size, resampling
plan) to an (error, cost) pair with the shape real learners exhibit:

* error never increases as the sample grows, everything else fixed;
* the error-minimizing position of the complexity coordinate (the last
  one) rises with the sample size: small samples favor simple configs;
* cost is linear in the sample size and in the complexity coordinate, and
  cross-validation costs (k-1)/(1-rho) times the holdout run.

The arm's error is ``base + amp * ||x_other - target||^2`` plus an
underfitting term ``A * (1 - c)^2`` and an overfitting term
``B * c * (full/s - 1)``. Replay runs the real controller against a
landscape under a named policy so scheduling changes can be compared on
identical ground.
"""

from __future__ import annotations

import json
import math
import zlib
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dataset import ResamplingPlan

__all__ = [
    "SurrogateArm",
    "SurrogateLandscape",
    "default_landscape",
    "load_landscape",
    "evaluate",
    "replay",
    "best_error_at",
    "POLICIES",
]

POLICIES = ("flaml", "roundrobin", "fulldata", "cv", "random")


class LandscapeError(ValueError):
    """Raised for malformed landscape definitions or unknown arms."""


@dataclass(frozen=True)
class SurrogateArm:
    """One synthetic learner: a quadratic bowl with sample-coupled fit terms."""

    name: str
    target: tuple[float, ...]  # optimum of the non-complexity coordinates
    base: float  # error floor at the optimum on full data
    amp: float  # curvature of the non-complexity misfit
    underfit: float  # penalty weight for low complexity
    overfit: float  # penalty weight for high complexity on small samples
    unit_cost: float  # seconds per training instance at zero complexity
    cost_weight: float  # relative cost increase at full complexity
    init: tuple[float, ...]  # low-cost starting point in the unit cube

    @property
    def d(self) -> int:
        return len(self.target) + 1

    def optimum(self) -> np.ndarray:
        return np.array(list(self.target) + [1.0])

    def error(self, x: np.ndarray, sample_fraction: float) -> float:
        x = np.asarray(x, dtype=float)
        if x.shape[0] != self.d:
            raise LandscapeError(f"arm {self.name!r} expects {self.d} coordinates")
        c = float(x[-1])
        misfit = self.amp * float(np.sum((x[:-1] - np.asarray(self.target)) ** 2))
        spare = 1.0 / sample_fraction - 1.0
        return self.base + misfit + self.underfit * (1.0 - c) ** 2 + self.overfit * c * spare

    def cost(self, x: np.ndarray, sample_size: int, plan: ResamplingPlan) -> float:
        c = float(np.asarray(x)[-1])
        base = self.unit_cost * sample_size * (1.0 + self.cost_weight * c)
        if plan.kind == "cv":
            base *= (plan.k - 1) / (1.0 - 0.1)
        return base


@dataclass(frozen=True)
class SurrogateLandscape:
    """A set of arms plus the nominal data shape the scheduler sees."""

    arms: tuple[SurrogateArm, ...]
    full_size: int = 1_000_000
    n_features: int = 10
    noise: float = 0.0

    def __post_init__(self) -> None:
        if not self.arms:
            raise LandscapeError("landscape needs at least one arm")
        names = [a.name for a in self.arms]
        if len(set(names)) != len(names):
            raise LandscapeError("duplicate arm names")

    def arm(self, name: str) -> SurrogateArm:
        for a in self.arms:
            if a.name == name:
                return a
        raise LandscapeError(f"unknown arm {name!r}")

    def cost_constant(self, name: str) -> float:
        cheapest = min(a.unit_cost for a in self.arms)
        return self.arm(name).unit_cost / cheapest

    def evaluate(
        self, name: str, x: np.ndarray, sample_size: int, plan: ResamplingPlan
    ) -> tuple[float, float]:
        arm = self.arm(name)
        s = min(max(int(sample_size), 1), self.full_size)
        err = arm.error(x, s / self.full_size)
        if self.noise > 0.0:
            err *= 1.0 + self.noise * _hash_unit(name, x, s)
        return err, arm.cost(x, s, plan)


def _hash_unit(name: str, x: np.ndarray, s: int) -> float:
    """Deterministic pseudo-noise in [-1, 1] keyed on the whole trial."""
    payload = (name + "|" + "|".join(f"{v:.12g}" for v in np.asarray(x)) + f"|{s}").encode()
    return zlib.crc32(payload) / 2**31 - 1.0


def evaluate(
    landscape: SurrogateLandscape,
    learner: str,
    x: np.ndarray,
    sample_size: int,
    plan: ResamplingPlan,
) -> tuple[float, float]:
    return landscape.evaluate(learner, x, sample_size, plan)


def default_landscape(full_size: int = 1_000_000, noise: float = 0.0) -> SurrogateLandscape:
    """Two arms with opposed strengths: one cheap and mediocre, one ten
    times costlier with a lower error floor."""
    return SurrogateLandscape(
        arms=(
            SurrogateArm(
                name="quick",
                target=(0.7, 0.4),
                base=0.20,
                amp=0.40,
                underfit=0.10,
                overfit=0.002,
                unit_cost=2e-4,
                cost_weight=1.0,
                init=(0.5, 0.5, 0.0),
            ),
            SurrogateArm(
                name="strong",
                target=(0.35, 0.65),
                base=0.08,
                amp=0.40,
                underfit=0.12,
                overfit=0.002,
                unit_cost=2e-3,
                cost_weight=1.0,
                init=(0.5, 0.5, 0.0),
            ),
        ),
        full_size=full_size,
        noise=noise,
    )


def load_landscape(source: str | Path) -> SurrogateLandscape:
    """Load a landscape from JSON, or the shipped default for "default"."""
    if str(source) == "default":
        return default_landscape()
    path = Path(source)
    if not path.exists():
        raise LandscapeError(f"landscape file not found: {path}")
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise LandscapeError(f"{path}: invalid JSON ({exc})") from None
    try:
        arms = tuple(
            SurrogateArm(
                name=a["name"],
                target=tuple(a["target"]),
                base=float(a["base"]),
                amp=float(a["amp"]),
                underfit=float(a["underfit"]),
                overfit=float(a["overfit"]),
                unit_cost=float(a["unit_cost"]),
                cost_weight=float(a["cost_weight"]),
                init=tuple(a["init"]),
            )
            for a in raw["arms"]
        )
        return SurrogateLandscape(
            arms=arms,
            full_size=int(raw.get("full_size", 1_000_000)),
            n_features=int(raw.get("n_features", 10)),
            noise=float(raw.get("noise", 0.0)),
        )
    except (KeyError, TypeError) as exc:
        raise LandscapeError(f"{path}: missing or malformed field ({exc})") from None


def replay(
    policy: str,
    landscape: SurrogateLandscape,
    budget: float,
    seed: int = 0,
) -> list[tuple[float, float]]:
    """Run the controller on a landscape under a named policy.

    Returns the anytime curve: (elapsed, best error so far) at each trial
    finish, elapsed advancing by synthetic cost only.
    """
    result = _surrogate_fit(policy, landscape, budget, seed)
    return result.anytime_curve()


def _surrogate_fit(policy, landscape, budget, seed):
    from . import controller

    if policy not in POLICIES:
        raise LandscapeError(f"unknown policy {policy!r}; known: {POLICIES}")
    kwargs = {}
    if policy == "roundrobin":
        kwargs["learner_policy"] = "roundrobin"
    elif policy == "random":
        kwargs["learner_policy"] = "random"
    elif policy == "fulldata":
        kwargs["sample_policy"] = "full"
    elif policy == "cv":
        kwargs["resample"] = "cv"
    return controller.surrogate_fit(landscape, budget, seed=seed, **kwargs)


def best_error_at(curve: list[tuple[float, float]], t: float) -> float:
    """Best error among trials finished by time t; +inf before the first."""
    best = math.inf
    for elapsed, err in curve:
        if elapsed <= t:
            best = err
        else:
            break
    return best
