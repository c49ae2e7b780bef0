"""Acceptance suite: one test per criterion, each printing a PASS line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines alongside pytest's own verdicts.
"""

import math
import time

import numpy as np
import pytest

from conftest import make_binary
from frugalml import localsearch
from frugalml.controller import fit, surrogate_fit, write_log
from frugalml.dataset import ResamplingPlan, split
from frugalml.eci import (
    LearnerState,
    eci,
    eci1,
    eci2,
    expected_cost,
    inverse_cost_weights,
    record_trial,
)
from frugalml.learners import evaluate, get_learner, predict, train
from frugalml.metrics import one_minus_auc
from frugalml.proposers import BudgetContext, choose_resampling
from frugalml.surrogate import (
    SurrogateArm,
    SurrogateLandscape,
    best_error_at,
    default_landscape,
    replay,
)


def _report(criterion: int, detail: str) -> None:
    print(f"ACCEPTANCE {criterion} PASS: {detail}")


# -- criterion 1: ECI estimates match an independent brute force of the
#    cost-for-improvement formula, including delta=0 and best-learner cases.
#    All fixture values are dyadic so both computations are exact.

ECI_FIXTURES = [
    # (k0, k1, k2, delta, best_error, last_cost, sample, full, best_overall)
    (128.0, 64.0, 16.0, 0.25, 0.5, 8.0, 1024, 4096, 0.25),
    (128.0, 64.0, 16.0, 0.25, 0.5, 8.0, 4096, 4096, 0.25),
    (128.0, 64.0, 16.0, 0.25, 0.5, 8.0, 1024, 4096, 0.5),      # best learner
    (100.0, 60.0, 20.0, 0.05, 0.25, 8.0, 1024, 4096, 0.20),
    (64.0, 64.0, 0.0, 0.0, 0.25, 4.0, 512, 4096, 0.125),       # delta = 0
    (64.0, 64.0, 0.0, 0.0, 0.25, 4.0, 4096, 4096, 0.25),       # delta = 0, best
    (12.0, 12.0, 12.0, 0.0, 0.5, 2.0, 256, 4096, 0.5),         # eci1 = 0
    (10.0, 6.0, 2.0, 0.5, 1.0, 0.5, 128, 4096, 0.5),
    (256.0, 128.0, 64.0, 0.125, 0.375, 16.0, 2048, 4096, 0.25),
    (32.0, 16.0, 8.0, 0.5, 2.0, 1.0, 64, 128, 1.0),
    (512.0, 256.0, 0.0, 1.0, 4.0, 32.0, 4096, 4096, 2.0),
    (48.0, 32.0, 16.0, 0.25, 0.75, 2.0, 512, 1024, 0.75),      # best learner
    (80.0, 48.0, 16.0, 0.0, 0.5, 4.0, 256, 1024, 0.25),        # delta = 0 late
    (96.0, 64.0, 32.0, 0.5, 1.5, 8.0, 1024, 1024, 0.5),
    (7.0, 5.0, 1.0, 0.25, 0.5, 0.25, 32, 64, 0.25),
    (1024.0, 512.0, 256.0, 2.0, 6.0, 64.0, 2048, 8192, 2.0),
    (20.0, 12.0, 4.0, 0.125, 0.25, 1.0, 128, 256, 0.125),      # best learner
    (144.0, 80.0, 16.0, 1.0, 3.0, 8.0, 4096, 8192, 1.0),
    (36.0, 20.0, 4.0, 0.5, 1.0, 2.0, 64, 4096, 0.75),
    (272.0, 144.0, 16.0, 4.0, 8.0, 16.0, 8192, 8192, 4.0),
    (6.0, 4.0, 2.0, 0.03125, 0.09375, 0.125, 16, 64, 0.0625),
    (640.0, 384.0, 128.0, 0.25, 0.625, 32.0, 4096, 16384, 0.375),
    (96.0, 96.0, 0.0, 0.0, 0.125, 8.0, 512, 2048, 0.0625),     # delta = 0
    (56.0, 40.0, 8.0, 0.5, 1.25, 4.0, 2048, 2048, 0.5),
]


def _oracle_eq1(k0, k1, k2, delta, best, last_cost, sample, full, best_all, c=2.0, gap_factor=2.0):
    e1 = max(k0 - k1, k1 - k2)
    e2 = c * last_cost if sample < full else math.inf
    if delta == 0.0:
        d, tau = best, k0
    else:
        d, tau = delta, k0 - k2
    gap = best - best_all
    gap_term = gap_factor * gap * tau / d if gap > 0 else 0.0
    return e1, e2, max(gap_term, min(e1, e2))


def test_criterion_1_eci_oracle_suite():
    start = time.perf_counter()
    assert len(ECI_FIXTURES) >= 20
    for row in ECI_FIXTURES:
        k0, k1, k2, delta, best, last_cost, sample, full, best_all = row
        st = LearnerState(name="x", cost_constant=1.0)
        st.tried = True
        st.k0, st.k1, st.k2, st.delta = k0, k1, k2, delta
        st.best_error, st.last_cost, st.sample_size = best, last_cost, sample
        want_e1, want_e2, want_eci = _oracle_eq1(*row)
        assert eci1(st) == want_e1
        assert eci2(st, 2.0, full) == want_e2
        est = eci(st, best_all, 2.0, full)
        assert est.eci == want_eci, row
    elapsed = time.perf_counter() - start
    assert elapsed < 1.0
    _report(1, f"{len(ECI_FIXTURES)} fixtures match the brute-force formula exactly "
               f"({elapsed * 1000:.0f} ms)")


def test_criterion_2_sampler_distribution():
    start = time.perf_counter()
    rng = np.random.default_rng(0)
    for vec in ([1.0, 3.0], [2.0, 2.0], [1.0, 1.0, 8.0]):
        p = inverse_cost_weights(vec)
        draws = rng.choice(len(vec), size=100_000, p=p)
        freq = np.bincount(draws, minlength=len(vec)) / 100_000
        assert np.all(np.abs(freq - p) <= 0.01), (vec, freq, p)
        harmonic = len(vec) / sum(1.0 / e for e in vec)
        assert expected_cost(vec) == harmonic  # exact, not approximate
    elapsed = time.perf_counter() - start
    assert elapsed < 5.0
    _report(2, f"frequencies within ±0.01 and E[ECI] equals the harmonic mean "
               f"({elapsed:.2f} s)")


def test_criterion_3_self_correction_monotonicity():
    st = LearnerState(name="x", cost_constant=1.0)
    record_trial(st, 1.0, 0.30)
    st.sample_size = 4096
    full = 4096
    other_eci = 4.0
    prev_e1 = None
    prev_p = None
    for step in range(25):
        record_trial(st, 1.0, 0.35)  # scripted failures
        e1 = eci1(st)
        est = eci(st, best_error_overall=0.30, c=2.0, full_size=full)
        p = inverse_cost_weights([est.eci, other_eci])[0]
        if prev_e1 is not None:
            assert e1 >= prev_e1, step
            assert p <= prev_p + 1e-15, step
        prev_e1, prev_p = e1, p
    _report(3, "eci1 non-decreasing and selection probability non-increasing "
               "over 25 scripted failures")


def test_criterion_4_local_search_convergence():
    results = {}
    norms_checked = 0
    for d in (2, 3, 5):
        successes = 0
        for seed in range(100):
            rng = np.random.default_rng(seed)
            a = rng.uniform(0.5, 2.0, d)
            opt = rng.uniform(0.2, 0.8, d)
            state = localsearch.LocalSearchState(
                center=rng.uniform(0, 1, d), rng=np.random.default_rng(10_000 + seed)
            )
            localsearch.set_adjustment_enabled(state, True)
            incumbent = math.inf
            best = math.inf
            steps = [state.stepsize]
            for _ in range(500):
                if state.converged:
                    localsearch.restart(state)
                    incumbent = math.inf
                    steps = [state.stepsize]
                cand = localsearch.propose(state)
                if state.pending_direction is not None:
                    assert abs(np.linalg.norm(state.pending_direction) - 1.0) <= 1e-9
                    norms_checked += 1
                value = float(np.sum(a * (cand - opt) ** 2))
                best = min(best, value)
                improved = value < incumbent
                localsearch.report(state, cand, improved)
                if improved:
                    incumbent = value
                steps.append(state.stepsize)
                assert steps[-1] <= steps[-2] + 1e-15  # non-increasing between restarts
                if best <= 1e-3:
                    successes += 1
                    break
        results[d] = successes
        assert successes >= 95, (d, successes)
    _report(4, f"within 1e-3 of the optimum for {results} of 100 seeds; "
               f"{norms_checked} direction norms at 1 within 1e-9")


def test_criterion_5_resampling_rule_boundary_grid():
    hour = 3600.0
    decisions = {}
    for n in (99_999, 100_000):
        for rate in (9_999_999, 10_000_000):
            # budget of n hours makes the computed rate equal `rate` exactly
            ctx = BudgetContext(budget_secs=n * hour, n_instances=n, n_features=rate)
            assert (ctx.n_instances * ctx.n_features) / (ctx.budget_secs / hour) == rate
            decisions[(n, rate)] = choose_resampling(ctx).kind
    assert decisions == {
        (99_999, 9_999_999): "cv",
        (99_999, 10_000_000): "holdout",
        (100_000, 9_999_999): "holdout",
        (100_000, 10_000_000): "holdout",
    }
    _report(5, "cv chosen only in the strict-inequality cell of the boundary grid")


def test_criterion_6_sample_size_schedule():
    full = 130_064
    # an arm with a constant error surface: no improvement is ever found, so
    # escalation, convergence at full size, restart and re-escalation all
    # happen within a short run
    arm = SurrogateArm(
        name="flat", target=(0.5,), base=0.1, amp=0.0, underfit=0.0,
        overfit=0.0, unit_cost=1e-5, cost_weight=0.0, init=(0.5, 0.0),
    )
    ls = SurrogateLandscape(arms=(arm,), full_size=full)
    result = surrogate_fit(ls, budget=1e9, seed=0)
    sizes = [t.sample_size for t in result.trials]
    expected_ramp = [10_000, 20_000, 40_000, 80_000, full]
    # split the run at restarts (size drops back down)
    sweeps = [[sizes[0]]]
    for s in sizes[1:]:
        if s < sweeps[-1][-1]:
            sweeps.append([s])
        else:
            sweeps[-1].append(s)
    assert len(sweeps) == 2, "one restart expected after full-size convergence"
    for sweep in sweeps:
        distinct = [sweep[0]]
        for s in sweep[1:]:
            if s != distinct[-1]:
                distinct.append(s)
        assert distinct == expected_ramp[: len(distinct)], distinct
        assert distinct[0] == 10_000
        # once at full size the size never changes within the sweep
        at_full = [s for s in sweep if s == full]
        tail = sweep[-len(at_full):] if at_full else []
        assert tail == at_full
    assert sweeps[0][-1] == full
    assert sweeps[1][0] == 10_000  # reset after restart
    _report(6, f"ramp {expected_ramp} realized, pinned at full, reset on restart "
               f"({len(result.trials)} trials)")


@pytest.fixture(scope="module")
def ablation_runs():
    ls = default_landscape(full_size=10**6)
    budget = 10_000.0
    start = time.perf_counter()
    runs = {}
    for seed in range(20):
        flaml_result = surrogate_fit(ls, budget, seed=seed)
        runs[seed] = {
            "flaml": flaml_result,
            "roundrobin": replay("roundrobin", ls, budget, seed),
            "fulldata": replay("fulldata", ls, budget, seed),
        }
    return runs, budget, time.perf_counter() - start


def test_criterion_7_ablation_reproduction(ablation_runs):
    runs, budget, elapsed = ablation_runs
    checkpoints = [budget * (j + 1) / 50 for j in range(50)]
    early = [t for t in checkpoints if t <= 0.1 * budget]
    rr_wins = rr_total = 0
    fd_wins = fd_total = 0
    for seed, bundle in runs.items():
        flaml_curve = bundle["flaml"].anytime_curve()
        for t in checkpoints:
            rr_total += 1
            rr_wins += best_error_at(flaml_curve, t) <= best_error_at(bundle["roundrobin"], t)
        for t in early:
            fd_total += 1
            fd_wins += best_error_at(flaml_curve, t) <= best_error_at(bundle["fulldata"], t)
    assert rr_wins / rr_total >= 0.70, rr_wins / rr_total
    assert fd_wins / fd_total >= 0.90, fd_wins / fd_total
    assert elapsed < 60.0
    _report(7, f"flaml<=roundrobin at {rr_wins}/{rr_total} checkpoints, "
               f"<=fulldata at {fd_wins}/{fd_total} early checkpoints "
               f"({elapsed:.1f} s for all runs)")


def test_criterion_8_anytime_cost_pattern(ablation_runs):
    runs, budget, _ = ablation_runs
    ok_seeds = 0
    for seed, bundle in runs.items():
        quartile_max = [0.0, 0.0, 0.0, 0.0]
        for t in bundle["flaml"].trials:
            q = min(3, int(t.elapsed_at_finish / (budget / 4)))
            quartile_max[q] = max(quartile_max[q], t.cost)
        seen = [v for v in quartile_max if v > 0]
        ok_seeds += all(a <= b for a, b in zip(seen, seen[1:]))
    assert ok_seeds >= 16, ok_seeds  # 80% of 20 seeds
    _report(8, f"max trial cost per quartile non-decreasing in {ok_seeds}/20 seeds")


def test_criterion_9_determinism(tmp_path):
    # surrogate mode: byte-identical trial logs
    ls = default_landscape()
    paths = []
    for name in ("a.jsonl", "b.jsonl"):
        r = surrogate_fit(ls, 5_000.0, seed=11)
        p = tmp_path / name
        write_log(r.trials, p)
        paths.append(p.read_bytes())
    assert paths[0] == paths[1]

    # real mode on a 5K-row synthetic dataset: identical config sequences
    # (tree counts are capped only to bound the runtime; determinism is
    # what is under test and holds for any space)
    data = make_binary(5_000, seed=21)
    caps = {"gbt": {"tree_num": {"high": 256}, "leaf_num": {"high": 64}}}

    def config_sequence():
        r = fit(data, budget_secs=1e9, seed=13, learners=["gbt"],
                resample="holdout", max_trials=12, space_overrides=caps)
        return [(t.learner, tuple(sorted(t.config.items())), t.sample_size, t.resample)
                for t in r.trials]

    seq_a = config_sequence()
    seq_b = config_sequence()
    assert seq_a == seq_b
    assert len(seq_a) == 12
    _report(9, "surrogate logs byte-identical; real-mode config sequences equal "
               "across repeated fits")


def test_criterion_10_end_to_end_desk_run():
    train_data = make_binary(20_000, seed=31)
    test_data = make_binary(5_000, seed=32)
    spec = get_learner("gbt")

    result = fit(train_data, budget_secs=60.0, seed=5, metric="one_minus_auc")
    tuned_err = one_minus_auc(predict(result.best_model, test_data.features),
                              test_data.labels)

    init_space = spec.build_space(train_data.n_instances)
    init_model = train(spec, init_space.init, train_data, seed=5, space=init_space)
    init_err = one_minus_auc(predict(init_model, test_data.features), test_data.labels)
    assert tuned_err < init_err, (tuned_err, init_err)

    # cv-vs-holdout trial cost at a matched configuration
    cfg = {"tree_num": 48, "leaf_num": 16, "min_child_weight": 2.0,
           "learning_rate": 0.1, "reg_lambda": 1.0}

    def cost_of(plan):
        return min(
            evaluate(spec, cfg, split(train_data, plan, seed=0), "one_minus_auc",
                     seed=0, space=init_space)[1]
            for _ in range(3)
        )

    ratio = cost_of(ResamplingPlan("cv", k=5)) / cost_of(ResamplingPlan("holdout", rho=0.1))
    expected = 4.0 / 0.9
    assert expected / 2 <= ratio <= expected * 2, ratio
    _report(10, f"60 s fit: 1-auc {tuned_err:.4f} < init {init_err:.4f}; "
                f"cv/holdout cost ratio {ratio:.2f} (target {expected:.2f} within x2)")
