import itertools

import numpy as np
import pytest

from activecc import (
    Clustering,
    GraphOracle,
    LoopConfig,
    OracleUnavailable,
    SearchSpaceTooLarge,
    SrraParams,
    brute_force_min,
    check_convergence_bound,
    convergence_bound,
    cost,
    draw_samples,
    estimate_regret,
    exact_regret,
    generate_planted,
    local_search_min,
    random_clustering,
    sort_clusters,
    srra_loop,
    uniform_loop,
    uniform_regret_estimator,
)
from activecc.optimize import (
    LoopRunner,
    canonical_assignments,
    loop_seed,
    move_delta_numerator,
)


def exhaustive_sample(sizes, p, seed, *, pivot=None):
    inst = generate_planted(list(sizes), p, seed=seed)
    n = inst.n
    pivot = sort_clusters(pivot if pivot is not None else inst.truth)
    sample = draw_samples(pivot, GraphOracle(inst.graph),
                          SrraParams(epsilon=0.5, q_override=n), seed=seed)
    return inst, pivot, sample


# ---------------------------------------------------------------- local search


def test_local_search_recovers_noiseless_truth():
    inst, pivot, sample = exhaustive_sample([6, 4], 0.0, seed=2,
                                            pivot=random_clustering(10, 2, np.random.default_rng(3)))
    result = local_search_min(sample, pivot, restarts=5, seed=9)
    best = brute_force_min(lambda c: cost(c, inst.graph), 10, 2)
    assert result.same_partition(inst.truth)
    assert cost(result, inst.graph) == cost(best, inst.graph) == 0


def test_local_search_fixed_point_returned_unchanged():
    inst, pivot, sample = exhaustive_sample([6, 4], 0.1, seed=4)
    first = local_search_min(sample, pivot, restarts=3, seed=1)
    again = local_search_min(sample, first, restarts=1, seed=2)
    assert estimate_regret(sample, again) == estimate_regret(sample, first)
    assert again.same_partition(first)


def test_local_search_never_scores_above_the_pivot():
    rng = np.random.default_rng(5)
    for seed in range(5):
        inst = generate_planted([8, 5, 3], 0.2, seed=seed)
        pivot = sort_clusters(random_clustering(16, 3, rng))
        sample = draw_samples(pivot, GraphOracle(inst.graph),
                              SrraParams(epsilon=0.5, q_override=4), seed=seed)
        start = random_clustering(16, 3, rng)
        result = local_search_min(sample, start, restarts=2, seed=seed)
        assert estimate_regret(sample, result) <= 0
        assert estimate_regret(sample, result) <= estimate_regret(sample, start)


def test_no_single_move_improves_a_local_optimum():
    inst, pivot, sample = exhaustive_sample([7, 4], 0.15, seed=6)
    result = local_search_min(sample, pivot, restarts=2, seed=3)
    est = sample.estimator()
    labels = result.labels.copy()
    for x in range(11):
        for b in range(2):
            assert move_delta_numerator(est, labels, x, b) >= 0


def test_move_delta_agrees_with_full_reevaluation():
    # 1000 random single-element moves, exact integer agreement
    inst = generate_planted([8, 6], 0.2, seed=7)
    pivot = sort_clusters(pivot_from(inst))
    sample = draw_samples(pivot, GraphOracle(inst.graph),
                          SrraParams(epsilon=0.5, q_override=5), seed=7)
    est = sample.estimator()
    rng = np.random.default_rng(11)
    labels = rng.integers(0, 2, size=14).astype(np.int64)
    for _ in range(1000):
        x = int(rng.integers(0, 14))
        b = int(rng.integers(0, 2))
        before = est.numerator(Clustering(labels, 2))
        delta = move_delta_numerator(est, labels, x, b)
        labels[x] = b
        after = est.numerator(Clustering(labels, 2))
        assert after - before == delta


def pivot_from(inst):
    return inst.truth


# ----------------------------------------------------------------- brute force


def test_brute_force_finds_the_noiseless_truth():
    inst = generate_planted([3, 2], 0.0, seed=0)
    best = brute_force_min(lambda c: cost(c, inst.graph), 5, 2)
    assert cost(best, inst.graph) == 0
    assert best.same_partition(inst.truth)


def test_brute_force_argmin_ignores_constant_shifts():
    inst = generate_planted([4, 3], 0.2, seed=1)
    pivot = sort_clusters(inst.truth)
    sample = draw_samples(pivot, GraphOracle(inst.graph),
                          SrraParams(epsilon=0.5, q_override=7), seed=1)
    est = sample.estimator()
    fast = brute_force_min(est, 7, 2)  # vectorized path
    shifted = brute_force_min(lambda c: est.value(c) + 3.25, 7, 2)  # generic path
    plain_cost = brute_force_min(lambda c: cost(c, inst.graph), 7, 2)
    assert fast == shifted
    # regret differs from cost by a constant, so the argmin agrees
    assert fast == plain_cost


def test_brute_force_matches_an_independent_enumerator():
    inst = generate_planted([5, 3], 0.15, seed=9)
    g = inst.graph
    best = brute_force_min(lambda c: cost(c, g), 8, 2)
    # different iteration order: raw label vectors, canonicalized for ties
    best_val, best_canon = None, None
    for labels in itertools.product(range(2), repeat=8):
        c = Clustering.from_labels(list(labels), k=2)
        val, canon = cost(c, g), c.canonical()
        if best_val is None or (val, canon) < (best_val, best_canon):
            best_val, best_canon = val, canon
    assert cost(best, g) == best_val
    assert best.canonical() == best_canon


def test_brute_force_guard():
    with pytest.raises(SearchSpaceTooLarge):
        brute_force_min(lambda c: 0, 30, 4)


def test_canonical_assignments_enumerate_partitions_once():
    got = list(canonical_assignments(4, 2))
    assert len(got) == 8  # partitions of 4 elements into <= 2 blocks
    assert got == sorted(got)
    assert all(Clustering.from_labels(list(a), 2).canonical() == a for a in got)


# ------------------------------------------------------------------- baseline


def test_loop_config_validation():
    params = SrraParams(epsilon=0.5, q_override=2)
    with pytest.raises(ValueError):
        LoopConfig(k=0, params=params, t_max=3)
    with pytest.raises(ValueError):
        LoopConfig(k=2, params=params, t_max=0)
    with pytest.raises(ValueError):
        LoopConfig(k=2, params=params, t_max=3, restarts=0)
    with pytest.raises(ValueError):
        LoopConfig(k=2, params=params, t_max=3, improvement_floor=-0.1)


def test_estimator_rejects_mismatched_candidates():
    inst, pivot, sample = exhaustive_sample([4, 3], 0.1, seed=3)
    with pytest.raises(ValueError):
        estimate_regret(sample, Clustering.from_labels([0, 1], k=2))


def test_census_estimator_is_the_exact_regret_as_a_linear_form():
    from activecc import RegretEstimator

    inst = generate_planted([5, 4, 2], 0.2, seed=8)
    pivot = sort_clusters(inst.truth)
    census = RegretEstimator.census(pivot, inst.graph)
    rng = np.random.default_rng(2)
    for _ in range(20):
        cand = random_clustering(11, 3, rng)
        assert census.value(cand) == exact_regret(pivot, cand, inst.graph)
    # full-information search plugs straight into the same minimizers
    best = brute_force_min(census, 11, 3)
    by_cost = brute_force_min(lambda c: cost(c, inst.graph), 11, 3)
    assert best == by_cost


def test_uniform_estimator_zero_at_pivot_and_exact_at_census():
    inst = generate_planted([5, 4], 0.2, seed=3)
    pivot = sort_clusters(inst.truth)
    est = uniform_regret_estimator(GraphOracle(inst.graph), pivot, m=36, seed=0)
    assert est.value(pivot) == 0.0
    rng = np.random.default_rng(1)
    for _ in range(10):
        cand = random_clustering(9, 2, rng)
        assert est.value(cand) == exact_regret(pivot, cand, inst.graph)


def test_uniform_estimator_is_unbiased():
    inst = generate_planted([6, 4], 0.1, seed=5)
    pivot = sort_clusters(inst.truth)
    cand = Clustering.from_labels([0, 0, 0, 1, 1, 0, 1, 0, 1, 1], k=2)
    f = exact_regret(pivot, cand, inst.graph)
    vals = np.array([
        uniform_regret_estimator(GraphOracle(inst.graph), pivot, m=15, seed=i).value(cand)
        for i in range(600)
    ])
    se = vals.std(ddof=1) / np.sqrt(vals.size)
    assert abs(vals.mean() - f) <= 3 * se
    with pytest.raises(ValueError):
        uniform_regret_estimator(GraphOracle(inst.graph), pivot, m=0, seed=0)


# ------------------------------------------------------------------- the loop


def exact_loop_setup(seed, sizes=(6, 4), p=0.1, k=2, **cfg_kw):
    inst = generate_planted(list(sizes), p, seed=seed)
    cfg = LoopConfig(k=k, params=SrraParams(epsilon=0.5, q_override=inst.n),
                     t_max=cfg_kw.pop("t_max", 4), seed=seed, **cfg_kw)
    init = random_clustering(inst.n, k, np.random.default_rng(loop_seed(seed, 0)))
    return inst, cfg, init


def test_exact_loop_reaches_optimum_at_t1_and_stays():
    inst, cfg, init = exact_loop_setup(seed=11, use_brute_force=True)
    opt = cost(brute_force_min(lambda c: cost(c, inst.graph), 10, 2), inst.graph)
    trace = srra_loop(GraphOracle(inst.graph), cfg, init, graph=inst.graph)
    assert [r.cost for r in trace.rows[1:]] == [opt] * (len(trace.rows) - 1)
    assert trace.stop_reason == "fixed_point"


def test_exact_loop_started_at_the_optimum_stays_there():
    inst, cfg, _ = exact_loop_setup(seed=13, use_brute_force=True)
    opt_c = brute_force_min(lambda c: cost(c, inst.graph), 10, 2)
    trace = srra_loop(GraphOracle(inst.graph), cfg, opt_c, graph=inst.graph)
    assert all(r.cost == cost(opt_c, inst.graph) for r in trace.rows)


def test_exact_loop_cost_is_nonincreasing():
    for seed in range(5):
        inst, cfg, init = exact_loop_setup(seed=seed, sizes=(8, 5, 3), k=3)
        trace = srra_loop(GraphOracle(inst.graph), cfg, init, graph=inst.graph)
        costs = [r.cost for r in trace.rows]
        assert all(b <= a for a, b in zip(costs, costs[1:]))


def test_trace_counts_match_the_ledger_at_every_iteration():
    inst = generate_planted([10, 6], 0.1, seed=17)
    cfg = LoopConfig(k=2, params=SrraParams(epsilon=0.5, q_override=4), t_max=4, seed=17)
    init = random_clustering(16, 2, np.random.default_rng(0))

    class SnapshottingOracle(GraphOracle):
        pass

    oracle = SnapshottingOracle(inst.graph)
    trace = srra_loop(oracle, cfg, init, graph=inst.graph)
    counts = [r.distinct_queries for r in trace.rows]
    assert counts == sorted(counts)
    assert counts[-1] == oracle.ledger.distinct_queries
    assert counts[0] == 0


def test_loop_stop_reasons():
    inst, cfg, init = exact_loop_setup(seed=19)
    trace = srra_loop(GraphOracle(inst.graph), cfg, init, graph=inst.graph)
    assert trace.stop_reason in {"fixed_point", "t_max", "improvement_floor"}

    one = LoopConfig(k=2, params=cfg.params, t_max=1, seed=19)
    trace1 = srra_loop(GraphOracle(inst.graph), one, init, graph=inst.graph)
    assert trace1.iterations == 1

    floor = LoopConfig(k=2, params=cfg.params, t_max=5, seed=19, improvement_floor=1e9)
    tracef = srra_loop(GraphOracle(inst.graph), floor, init, graph=inst.graph)
    assert tracef.stop_reason in {"improvement_floor", "fixed_point"}
    assert tracef.iterations == 1


def test_loop_truncates_when_the_oracle_fails():
    inst = generate_planted([6, 5], 0.2, seed=23)
    cfg = LoopConfig(k=2, params=SrraParams(epsilon=0.5, q_override=3), t_max=4, seed=23)
    init = random_clustering(11, 2, np.random.default_rng(1))
    full = srra_loop(GraphOracle(inst.graph), cfg, init, graph=inst.graph)
    assert full.iterations >= 2
    round1 = full.rows[1].distinct_queries
    assert full.rows[2].distinct_queries > round1  # round 2 needs new pairs

    class FlakyOracle(GraphOracle):
        def _resolve(self, key):
            if self.ledger.distinct_queries >= round1:
                raise OracleUnavailable("label source went away")
            return super()._resolve(key)

    flaky = FlakyOracle(inst.graph)
    trace = srra_loop(flaky, cfg, init, graph=inst.graph)
    assert trace.truncated
    assert trace.stop_reason == "oracle_unavailable"
    assert trace.iterations == 1
    assert [r.pivot for r in trace.rows] == [r.pivot for r in full.rows[:2]]


def test_stepwise_runner_equals_one_shot_loop():
    inst, cfg, init = exact_loop_setup(seed=29)
    oracle_a = GraphOracle(inst.graph)
    runner = LoopRunner(oracle_a, cfg, init, "srra", graph=inst.graph)
    while True:
        plan = runner.begin_iteration()
        if plan is None:
            break
        runner.step()
    direct = srra_loop(GraphOracle(inst.graph), cfg, init, graph=inst.graph)
    assert [r.pivot for r in runner.trace.rows] == [r.pivot for r in direct.rows]
    assert runner.trace.stop_reason == direct.stop_reason


def test_uniform_loop_runs_and_accounts_queries():
    inst = generate_planted([10, 6, 4], 0.1, seed=31)
    cfg = LoopConfig(k=3, params=SrraParams(epsilon=0.5, q_override=4), t_max=3, seed=31)
    init = random_clustering(20, 3, np.random.default_rng(2))
    oracle = GraphOracle(inst.graph)
    trace = uniform_loop(oracle, cfg, init, graph=inst.graph)
    assert trace.rows[-1].distinct_queries == oracle.ledger.distinct_queries
    assert cost(trace.final_pivot, inst.graph) <= trace.rows[0].cost


def test_trace_csv_round_trip(tmp_path):
    inst, cfg, init = exact_loop_setup(seed=37)
    trace = srra_loop(GraphOracle(inst.graph), cfg, init, graph=inst.graph)
    path = tmp_path / "trace.csv"
    trace.write_csv(path)
    lines = path.read_text().strip().split("\n")
    assert lines[0] == "t,cost,fhat_min,distinct_queries"
    assert len(lines) == len(trace.rows) + 1


# ------------------------------------------------------------- the bound check


def test_bound_at_zero_smoothness_demands_optimality():
    inst, cfg, init = exact_loop_setup(seed=41, use_brute_force=True)
    trace = srra_loop(GraphOracle(inst.graph), cfg, init, graph=inst.graph)
    opt = cost(brute_force_min(lambda c: cost(c, inst.graph), 10, 2), inst.graph)
    d0 = trace.rows[0].cost
    assert convergence_bound(1, opt, 0.0, d0) == opt
    assert all(check_convergence_bound(trace, opt, 0.0, d0))


def test_bound_decays_geometrically():
    vals = [convergence_bound(t, opt=10, epsilon=0.1, d0=50) for t in range(1, 8)]
    assert all(b < a for a, b in zip(vals, vals[1:]))


def test_bound_rejects_epsilon_outside_hypothesis():
    inst, cfg, init = exact_loop_setup(seed=43)
    trace = srra_loop(GraphOracle(inst.graph), cfg, init, graph=inst.graph)
    with pytest.raises(ValueError):
        check_convergence_bound(trace, opt=1, epsilon_used=0.2, d0=10)
    with pytest.raises(ValueError):
        check_convergence_bound(trace, opt=1, epsilon_used=-0.01, d0=10)
