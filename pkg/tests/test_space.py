import math

import numpy as np
import pytest

from frugalml.space import Dimension, SearchSpace, SpaceError, apply_overrides, default_space


def test_gbt_tree_cap_follows_data_size():
    space = default_space("gbt", 1000)
    dim = {d.name: d for d in space.dims}["tree_num"]
    assert dim.low == 4 and dim.high == 1000


def test_gbt_tree_cap_saturates():
    dim = {d.name: d for d in default_space("gbt", 10**6).dims}["tree_num"]
    assert dim.high == 32768


def test_gbt_init_is_low_cost_point():
    init = default_space("gbt", 50_000).init
    assert init["tree_num"] == 4
    assert init["leaf_num"] == 4
    assert init["min_child_weight"] == 20.0


def test_rf_has_categorical_criterion():
    space = default_space("rf", 5000)
    dim = {d.name: d for d in space.dims}["split_criterion"]
    assert dim.kind == "categorical"
    assert set(dim.choices) == {"gini", "entropy"}


def test_unknown_learner_rejected():
    with pytest.raises(SpaceError):
        default_space("nope", 100)


def test_log_dim_endpoints():
    dim = Dimension("t", "int", 4, 32768, scale="log")
    assert dim.from_unit(0.0) == 4
    assert dim.from_unit(1.0) == 32768


def test_log_dim_midpoint_is_geometric():
    dim = Dimension("t", "int", 4, 32768, scale="log")
    # geometric midpoint sqrt(4 * 32768) = 362.04, rounded half-up
    assert dim.from_unit(0.5) == 362


def test_from_unit_clamps_out_of_range():
    dim = Dimension("x", "float", 0.0, 10.0)
    assert dim.from_unit(-0.2) == 0.0
    assert dim.from_unit(1.7) == 10.0


def test_categorical_partition_and_boundary_tie():
    dim = Dimension("c", "categorical", choices=("a", "b"))
    assert dim.from_unit(0.25) == "a"
    assert dim.from_unit(0.75) == "b"
    # exact boundary resolves to the lower index
    assert dim.from_unit(0.5) == "a"
    assert dim.from_unit(0.0) == "a"
    assert dim.from_unit(1.0) == "b"


def test_roundtrip_floats_and_ints():
    space = default_space("gbt", 130_064)
    rng = np.random.default_rng(0)
    for _ in range(50):
        point = rng.uniform(0, 1, space.d)
        a = space.from_unit(point)
        b = space.from_unit(space.to_unit(a))
        for name in space.names():
            if isinstance(a[name], int):
                assert a[name] == b[name]
            else:
                assert math.isclose(a[name], b[name], rel_tol=1e-12)


def test_projection_idempotent():
    space = default_space("rf", 5000)
    rng = np.random.default_rng(1)
    for _ in range(50):
        p = rng.uniform(-0.5, 1.5, space.d)
        a = space.from_unit(p)
        again = space.from_unit(space.to_unit(a))
        assert a == again


def test_from_unit_monotone_per_dimension():
    for dim in default_space("gbt", 20_000).dims:
        ts = np.linspace(0, 1, 33)
        vals = [dim.from_unit(t) for t in ts]
        assert all(vals[i] <= vals[i + 1] for i in range(len(vals) - 1))


def test_init_within_ranges_for_all_learners():
    for name in ("gbt", "rf", "lr"):
        for size in (1, 10, 5_000, 10**6):
            space = default_space(name, size)
            assert space.contains(space.init)


def test_init_outside_range_rejected():
    with pytest.raises(SpaceError):
        SearchSpace(
            dims=(Dimension("x", "float", 0.0, 1.0),),
            init={"x": 2.0},
        )


def test_apply_overrides():
    space = default_space("gbt", 10_000)
    out = apply_overrides(space, {"learning_rate": {"low": 0.05, "high": 0.5, "init": 0.2}})
    dim = {d.name: d for d in out.dims}["learning_rate"]
    assert dim.low == 0.05 and dim.high == 0.5
    assert out.init["learning_rate"] == 0.2
    with pytest.raises(SpaceError):
        apply_overrides(space, {"not_a_dim": {"low": 1}})


def test_degenerate_range_collapses():
    # two-row dataset: tree bounds collapse to [4, 4] without inverting
    space = default_space("gbt", 2)
    dim = {d.name: d for d in space.dims}["tree_num"]
    assert dim.low == dim.high == 4
    assert dim.from_unit(0.3) == 4
    assert dim.to_unit(4) == 0.5
