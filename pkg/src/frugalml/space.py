"""Hyperparameter search spaces and unit-cube transforms.

Each learner owns a ``SearchSpace``: an ordered list of dimensions with
native ranges plus a low-cost initial assignment. The local search operates
on points in ``[0, 1]^d``; ``to_unit``/``from_unit`` convert between native
assignments and that cube. Log-scaled dimensions move multiplicatively so
that ranges spanning several orders of magnitude take sensible steps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

__all__ = [
    "Dimension",
    "SearchSpace",
    "default_space",
    "apply_overrides",
]


class SpaceError(ValueError):
    """Raised for malformed spaces or assignments outside the domain."""


@dataclass(frozen=True)
class Dimension:
    """One hyperparameter axis.

    kind: "float", "int" or "categorical". Numeric kinds use (low, high)
    with the declared scale; categorical uses ``choices`` mapped onto evenly
    partitioned unit intervals. ``cost_related`` flags axes that drive trial
    cost (tree counts and the like).
    """

    name: str
    kind: str = "float"
    low: float | None = None
    high: float | None = None
    choices: tuple[Any, ...] = ()
    scale: str = "linear"
    cost_related: bool = False

    def __post_init__(self) -> None:
        if self.kind not in ("float", "int", "categorical"):
            raise SpaceError(f"unknown dimension kind {self.kind!r}")
        if self.kind == "categorical":
            if not self.choices:
                raise SpaceError(f"categorical dim {self.name!r} needs choices")
        else:
            if self.low is None or self.high is None or self.low > self.high:
                raise SpaceError(f"dim {self.name!r} needs low <= high")
            if self.scale == "log" and self.low <= 0:
                raise SpaceError(f"log dim {self.name!r} needs positive bounds")

    def to_unit(self, value: Any) -> float:
        if self.kind == "categorical":
            try:
                idx = self.choices.index(value)
            except ValueError:
                raise SpaceError(f"{value!r} not a choice of {self.name!r}") from None
            return (idx + 0.5) / len(self.choices)
        lo, hi = float(self.low), float(self.high)
        if hi == lo:
            return 0.5
        v = float(value)
        if self.scale == "log":
            return (math.log(v) - math.log(lo)) / (math.log(hi) - math.log(lo))
        return (v - lo) / (hi - lo)

    def from_unit(self, t: float) -> Any:
        t = min(1.0, max(0.0, float(t)))
        if self.kind == "categorical":
            n = len(self.choices)
            # Ties at partition boundaries resolve to the lower index.
            idx = min(n - 1, max(0, math.ceil(t * n) - 1))
            return self.choices[idx]
        lo, hi = float(self.low), float(self.high)
        if hi == lo:
            v = lo
        elif self.scale == "log":
            v = math.exp(math.log(lo) + t * (math.log(hi) - math.log(lo)))
        else:
            v = lo + t * (hi - lo)
        if self.kind == "int":
            return int(min(hi, max(lo, math.floor(v + 0.5))))
        return min(hi, max(lo, v))


@dataclass(frozen=True)
class SearchSpace:
    """Ordered dimensions plus the low-cost initial assignment."""

    dims: tuple[Dimension, ...]
    init: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        names = [d.name for d in self.dims]
        if len(set(names)) != len(names):
            raise SpaceError("duplicate dimension names")
        for d in self.dims:
            if d.name not in self.init:
                raise SpaceError(f"init is missing dimension {d.name!r}")
        # init must lie within every range
        for d in self.dims:
            v = self.init[d.name]
            if d.kind == "categorical":
                if v not in d.choices:
                    raise SpaceError(f"init {d.name}={v!r} outside choices")
            elif not (d.low <= v <= d.high):
                raise SpaceError(f"init {d.name}={v!r} outside [{d.low}, {d.high}]")

    @property
    def d(self) -> int:
        return len(self.dims)

    def names(self) -> list[str]:
        return [d.name for d in self.dims]

    def to_unit(self, assignment: dict[str, Any]) -> np.ndarray:
        return np.array([dim.to_unit(assignment[dim.name]) for dim in self.dims])

    def from_unit(self, point: Sequence[float]) -> dict[str, Any]:
        if len(point) != self.d:
            raise SpaceError(f"expected {self.d} coordinates, got {len(point)}")
        return {dim.name: dim.from_unit(t) for dim, t in zip(self.dims, point)}

    def init_unit(self) -> np.ndarray:
        return self.to_unit(self.init)

    def contains(self, assignment: dict[str, Any]) -> bool:
        for dim in self.dims:
            if dim.name not in assignment:
                return False
            v = assignment[dim.name]
            if dim.kind == "categorical":
                if v not in dim.choices:
                    return False
            elif not (dim.low <= v <= dim.high):
                return False
        return True


def _tree_cap(n_instances: int, cap: int) -> int:
    # Upper bounds follow min(cap, S); degenerate tiny datasets collapse the
    # range to the lower bound rather than inverting it.
    return max(4, min(cap, int(n_instances)))


def default_space(learner_name: str, n_instances: int) -> SearchSpace:
    """Default per-learner space; tree-count style bounds cap at the data size."""
    s = int(n_instances)
    if learner_name == "gbt":
        hi = _tree_cap(s, 32768)
        return SearchSpace(
            dims=(
                Dimension("tree_num", "int", 4, hi, scale="log", cost_related=True),
                Dimension("leaf_num", "int", 4, hi, scale="log", cost_related=True),
                Dimension("min_child_weight", "float", 0.01, 20.0, scale="log"),
                Dimension("learning_rate", "float", 0.01, 1.0, scale="log"),
                Dimension("reg_lambda", "float", 1e-10, 1.0, scale="log"),
            ),
            init={
                "tree_num": 4,
                "leaf_num": 4,
                "min_child_weight": 20.0,
                "learning_rate": 0.1,
                "reg_lambda": 1.0,
            },
        )
    if learner_name == "rf":
        hi = _tree_cap(s, 2048)
        return SearchSpace(
            dims=(
                Dimension("tree_num", "int", 4, hi, scale="log", cost_related=True),
                Dimension("max_features_fraction", "float", 0.1, 1.0, scale="linear"),
                Dimension("split_criterion", "categorical", choices=("gini", "entropy")),
            ),
            init={
                "tree_num": 4,
                "max_features_fraction": 0.1,
                "split_criterion": "gini",
            },
        )
    if learner_name == "lr":
        return SearchSpace(
            dims=(Dimension("C", "float", 0.03125, 32768.0, scale="log"),),
            init={"C": 0.03125},
        )
    raise SpaceError(f"no default space for learner {learner_name!r}")


def apply_overrides(space: SearchSpace, overrides: dict[str, dict[str, Any]]) -> SearchSpace:
    """Rebuild a space with per-dimension (low, high, scale, init) overrides."""
    dims = []
    init = dict(space.init)
    for dim in space.dims:
        ov = overrides.get(dim.name)
        if ov is None:
            dims.append(dim)
            continue
        if dim.kind == "categorical":
            raise SpaceError(f"cannot override categorical dim {dim.name!r}")
        low = ov.get("low", dim.low)
        high = ov.get("high", dim.high)
        scale = ov.get("scale", dim.scale)
        dims.append(Dimension(dim.name, dim.kind, low, high, scale=scale,
                              cost_related=dim.cost_related))
        if "init" in ov:
            init[dim.name] = ov["init"]
    unknown = set(overrides) - {d.name for d in space.dims}
    if unknown:
        raise SpaceError(f"override names not in space: {sorted(unknown)}")
    return SearchSpace(dims=tuple(dims), init=init)
