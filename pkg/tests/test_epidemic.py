import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from cutplan.arrangement import LinearArrangement, MCMConfig, order_mcm
from cutplan.epidemic import (
    BudgetSchedule,
    DiffusionParams,
    EpidemicState,
    Strategy,
    allocate_resources,
    count_contagious_edges,
    run_ensemble,
    simulate,
)
from cutplan.graph import Graph, gen_erdos_renyi

FIG_EDGES = [(0, 3), (3, 1), (1, 2), (2, 4)]


def isolated(n):
    return Graph(n, [])


def k4():
    return Graph(4, [(i, j) for i in range(4) for j in range(i + 1, 4)])


class TestBudgetSchedule:
    def test_constant(self):
        b = BudgetSchedule(3)
        assert b.at(0) == 3 and b.at(1e9) == 3

    def test_piecewise_lookup(self):
        b = BudgetSchedule.piecewise([0.0, 5.0], [0, 2])
        assert b.at(0) == 0
        assert b.at(4.999) == 0
        assert b.at(5.0) == 2
        assert b.at(100.0) == 2

    def test_integer_valued_floats_accepted(self):
        b = BudgetSchedule.piecewise([0.0, 1.0], [0.0, 2.0])
        assert b.at(1.5) == 2

    def test_validation(self):
        with pytest.raises(ValueError):
            BudgetSchedule(-1)
        with pytest.raises(ValueError):
            BudgetSchedule.piecewise([1.0, 2.0], [0, 1])
        with pytest.raises(ValueError):
            BudgetSchedule.piecewise([0.0, 0.0], [0, 1])
        with pytest.raises(ValueError):
            BudgetSchedule.piecewise([0.0, 1.0], [0, -1])
        with pytest.raises(ValueError):
            BudgetSchedule.piecewise([0.0, 1.0], [0.5, 1.0])
        with pytest.raises(ValueError):
            BudgetSchedule.piecewise([0.0], [1, 2])
        with pytest.raises(ValueError):
            BudgetSchedule(2).at(-0.1)

    def test_equality(self):
        assert BudgetSchedule(2) == BudgetSchedule(2)
        assert BudgetSchedule(2) != BudgetSchedule(3)


class TestDiffusionParams:
    def test_derived_rates(self):
        p = DiffusionParams(beta=0.5, delta=2.0, rho=6.0)
        assert p.r == 0.25 and p.e == 3.0

    def test_int_budget_normalized(self):
        p = DiffusionParams(beta=1.0, delta=1.0, budget=4)
        assert isinstance(p.budget, BudgetSchedule)
        assert p.budget.at(0) == 4

    def test_validation(self):
        with pytest.raises(ValueError):
            DiffusionParams(beta=-0.1, delta=1.0)
        with pytest.raises(ValueError):
            DiffusionParams(beta=1.0, delta=0.0)
        with pytest.raises(ValueError):
            DiffusionParams(beta=1.0, delta=1.0, rho=-1.0)


class TestStrategy:
    def test_factories(self):
        arr = LinearArrangement.identity(3)
        s = Strategy.priority(arr)
        assert s.kind == "priority" and s.arrangement is arr
        assert Strategy.none().arrangement is None

    def test_validation(self):
        with pytest.raises(ValueError):
            Strategy("priority")
        with pytest.raises(ValueError):
            Strategy("none", LinearArrangement.identity(2))
        with pytest.raises(ValueError):
            Strategy("greedy")

    def test_size_mismatch_at_simulate(self):
        g = isolated(3)
        s = Strategy.priority(LinearArrangement.identity(4))
        with pytest.raises(ValueError):
            simulate(g, DiffusionParams(0.0, 1.0), s)


class TestEpidemicState:
    def test_k4_single_infected(self):
        x = np.array([1, 0, 0, 0], dtype=bool)
        st_ = EpidemicState(k4(), x)
        assert st_.infected_count == 1
        assert st_.contagious_edge_count == 3
        assert st_.pressure.tolist() == [0, 1, 1, 1]
        st_.validate(k4())

    def test_all_infected_no_contagious_edges(self):
        st_ = EpidemicState.all_infected(k4())
        assert st_.infected_count == 4
        assert st_.contagious_edge_count == 0

    def test_resource_on_healthy_rejected(self):
        x = np.array([1, 0, 0, 0], dtype=bool)
        r = np.array([0, 1, 0, 0], dtype=bool)
        with pytest.raises(ValueError):
            EpidemicState(k4(), x, r)

    def test_count_contagious_front_cut(self):
        # infect the nodes at positions 3..5 of the layout (1,3,4,2,5); the
        # crossing count at the front equals the cut value there, which is 1
        g = Graph(5, FIG_EDGES)
        pos = np.array([1, 3, 4, 2, 5])
        infected = pos >= 3
        assert count_contagious_edges(g, infected) == 1

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.integers(2, 18),
           st.floats(0.0, 0.6), st.integers(0, 2**32 - 1))
    def test_caches_match_brute_force(self, gseed, n, p, xseed):
        g = gen_erdos_renyi(n, p, seed=gseed)
        x = np.random.default_rng(xseed).random(n) < 0.4
        st_ = EpidemicState(g, x)
        brute = sum(1 for u, v in g.edges if x[u] != x[v])
        assert st_.contagious_edge_count == brute
        assert st_.contagious_edge_count == count_contagious_edges(g, x)
        for v in range(n):
            assert st_.pressure[v] == int(x[g.neighbors(v)].sum())


class TestAllocateResources:
    def test_identity_order(self):
        g = isolated(4)
        st_ = EpidemicState(g, [1, 0, 1, 1])
        r = allocate_resources(st_, LinearArrangement.identity(4), 2)
        assert r.tolist() == [True, False, True, False]

    def test_no_infected(self):
        g = isolated(3)
        st_ = EpidemicState(g, [0, 0, 0])
        r = allocate_resources(st_, LinearArrangement.identity(3), 5)
        assert not r.any()

    def test_priority_by_position_not_id(self):
        g = isolated(3)
        st_ = EpidemicState(g, [1, 1, 1])
        order = LinearArrangement(np.array([3, 2, 1]))
        r = allocate_resources(st_, order, 1)
        assert r.tolist() == [False, False, True]

    def test_surplus_budget_treats_all(self):
        g = isolated(3)
        st_ = EpidemicState(g, [0, 1, 1])
        r = allocate_resources(st_, LinearArrangement.identity(3), 9)
        assert r.tolist() == [False, True, True]

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.integers(1, 15),
           st.integers(0, 20), st.integers(0, 2**32 - 1))
    def test_allocation_invariants(self, xseed, n, b, oseed):
        rng = np.random.default_rng(xseed)
        x = rng.random(n) < 0.5
        order = LinearArrangement(
            np.random.default_rng(oseed).permutation(n) + 1)
        st_ = EpidemicState(isolated(n), x)
        r = allocate_resources(st_, order, b)
        assert r.sum() == min(b, x.sum())
        assert not (r & ~x).any()
        if r.any():
            treated_pos = order.positions[r]
            untreated_pos = order.positions[x & ~r]
            if untreated_pos.size:
                assert treated_pos.max() < untreated_pos.min()


class TestClosedForms:
    # each case pins one rate term: delta alone, the max of two clocks, the
    # rho boost, and the min(b, N_I) clamp

    def test_single_node_mean_one_over_delta(self):
        s = run_ensemble(isolated(1), DiffusionParams(0.0, 1.0),
                         Strategy.none(), n_runs=2000, base_seed=10)
        assert s.n_censored == 0
        assert abs(s.mean_extinction_time - 1.0) < 3 * 1.0 / np.sqrt(2000)

    def test_two_nodes_mean_three_halves(self):
        s = run_ensemble(isolated(2), DiffusionParams(0.0, 1.0),
                         Strategy.none(), n_runs=2000, base_seed=11)
        se = np.sqrt(1.25 / 2000)
        assert abs(s.mean_extinction_time - 1.5) < 3 * se

    def test_boosted_recovery(self):
        p = DiffusionParams(beta=0.0, delta=1.0, rho=9.0, budget=1)
        s = run_ensemble(isolated(1), p,
                         Strategy.priority(LinearArrangement.identity(1)),
                         n_runs=2000, base_seed=12)
        se = np.sqrt(0.01 / 2000)
        assert abs(s.mean_extinction_time - 0.1) < 3 * se

    def test_surplus_budget_boosts_everyone(self):
        # b=5 > N_I=2, so both nodes recover at delta+rho = 5.5 and the
        # extinction time is the max of two Exp(5.5) draws, mean 3/11
        p = DiffusionParams(beta=0.0, delta=1.0, rho=4.5, budget=5)
        s = run_ensemble(isolated(2), p,
                         Strategy.priority(LinearArrangement.identity(2)),
                         n_runs=2000, base_seed=13)
        se = np.sqrt((1.25 / 5.5**2) / 2000)
        assert abs(s.mean_extinction_time - 3.0 / 11.0) < 3 * se

    def test_harmonic_ten(self):
        h10 = sum(1.0 / k for k in range(1, 11))
        var = sum(1.0 / k**2 for k in range(1, 11))
        s = run_ensemble(isolated(10), DiffusionParams(0.0, 1.0),
                         Strategy.none(), n_runs=2000, base_seed=14)
        assert abs(s.mean_extinction_time - h10) < 3 * np.sqrt(var / 2000)


class TestRecoveryTargeting:
    def test_treated_node_recovers_first(self):
        # node 1 sits at position 1 so it holds the single resource; its
        # recovery rate is 19 against 1, so it wins the race 19/20 of runs
        g = isolated(2)
        order = LinearArrangement(np.array([2, 1]))
        p = DiffusionParams(beta=0.0, delta=1.0, rho=18.0, budget=1)
        wins = 0
        runs = 3000
        for i in range(runs):
            tr = simulate(g, p, Strategy.priority(order), seed=100 + i)
            if tr.nodes[0] == 1:
                wins += 1
        frac = wins / runs
        sigma = np.sqrt(0.95 * 0.05 / runs)
        assert abs(frac - 0.95) < 3.5 * sigma

    def test_none_strategy_ignores_budget(self):
        g = isolated(2)
        p = DiffusionParams(beta=0.0, delta=1.0, rho=18.0, budget=1)
        wins = 0
        runs = 3000
        for i in range(runs):
            tr = simulate(g, p, Strategy.none(), seed=500 + i)
            if tr.nodes[0] == 1:
                wins += 1
        sigma = np.sqrt(0.25 / runs)
        assert abs(wins / runs - 0.5) < 3.5 * sigma


class TestExtinctionDistribution:
    def test_ks_max_of_iid_exponentials(self):
        # with beta=0 and no resources the extinction time is the max of
        # N_I iid Exp(delta) clocks
        k = 5
        s = run_ensemble(isolated(k), DiffusionParams(0.0, 1.0),
                         Strategy.none(), n_runs=10_000, base_seed=77)
        assert s.n_censored == 0
        res = stats.kstest(s.extinction_times,
                           lambda t: (1.0 - np.exp(-t)) ** k)
        assert res.pvalue > 0.01


class TestBudgetSwitch:
    def test_treatment_arrival_sets_timescale(self):
        # recovery is negligible until the budget turns on at t=5, then
        # nearly instant, so extinction clusters just past 5
        g = isolated(1)
        sched = BudgetSchedule.piecewise([0.0, 5.0], [0, 1])
        p = DiffusionParams(beta=0.0, delta=0.001, rho=1000.0, budget=sched)
        s = run_ensemble(g, p, Strategy.priority(LinearArrangement.identity(1)),
                         n_runs=1000, base_seed=21)
        assert s.n_censored == 0
        assert 4.9 < s.mean_extinction_time < 5.1


def replay(g, initial_count, x0, tr):
    x = x0.copy()
    prev = -1.0
    for t, v, kind in zip(tr.times, tr.nodes, tr.kinds):
        assert t > prev
        prev = t
        if kind == 0:
            assert x[v] == 0
            assert x[g.neighbors(v)].any(), "infection without infected neighbor"
            x[v] = 1
        else:
            assert x[v] == 1
            x[v] = 0
    return x


class TestTrajectoryIntegrity:
    def test_replay_audit(self):
        g = gen_erdos_renyi(25, 0.15, seed=1)
        la, _ = order_mcm(g, MCMConfig(seed=2))
        p = DiffusionParams(beta=0.3, delta=1.0, rho=2.0, budget=2)
        tr = simulate(g, p, Strategy.priority(la), seed=7, check_every=1)
        x0 = np.ones(25, dtype=np.uint8)
        x_end = replay(g, 25, x0, tr)
        if tr.extinction_time is not None:
            assert x_end.sum() == 0
            assert tr.extinction_time == tr.times[-1]
        # peak and curve from an independent replay
        x = x0.copy()
        counts = [25]
        for v, kind in zip(tr.nodes, tr.kinds):
            x[v] = 1 if kind == 0 else 0
            counts.append(int(x.sum()))
        counts = np.array(counts)
        assert tr.peak_infected == counts.max()
        idx = np.searchsorted(tr.times, tr.curve_times, side="right")
        assert np.array_equal(tr.curve_counts, counts[idx])

    def test_determinism(self):
        g = gen_erdos_renyi(20, 0.2, seed=3)
        p = DiffusionParams(beta=0.4, delta=1.0, rho=1.0, budget=1)
        s = Strategy.priority(LinearArrangement.identity(20))
        a = simulate(g, p, s, seed=42)
        b = simulate(g, p, s, seed=42)
        assert np.array_equal(a.times, b.times)
        assert np.array_equal(a.nodes, b.nodes)
        assert np.array_equal(a.kinds, b.kinds)
        c = simulate(g, p, s, seed=43)
        assert not np.array_equal(a.times, c.times)

    def test_none_equals_zero_budget(self):
        g = gen_erdos_renyi(15, 0.2, seed=9)
        base = dict(beta=0.5, delta=1.0, rho=3.0)
        a = simulate(g, DiffusionParams(**base, budget=0),
                     Strategy.priority(LinearArrangement.identity(15)), seed=5)
        b = simulate(g, DiffusionParams(**base, budget=7),
                     Strategy.none(), seed=5)
        assert np.array_equal(a.times, b.times)
        assert np.array_equal(a.nodes, b.nodes)
        assert a.extinction_time == b.extinction_time

    def test_beta_zero_counts_nonincreasing(self):
        tr = simulate(isolated(6), DiffusionParams(0.0, 1.0),
                      Strategy.none(), seed=2)
        assert (np.diff(tr.curve_counts) <= 0).all()
        assert (tr.kinds == 1).all()

    def test_empty_initial_state(self):
        tr = simulate(isolated(4), DiffusionParams(1.0, 1.0),
                      Strategy.none(), initial=np.zeros(4, dtype=bool), seed=0)
        assert tr.extinction_time == 0.0
        assert tr.n_events == 0
        assert tr.curve_counts[0] == 0

    def test_curve_reaches_zero_on_extinction(self):
        tr = simulate(isolated(3), DiffusionParams(0.0, 1.0),
                      Strategy.none(), seed=4, horizon=100.0, sample_dt=0.25)
        assert tr.extinction_time is not None
        assert tr.curve_counts[0] == 3
        assert tr.curve_counts[-1] == 0
        assert tr.curve_times[-1] >= tr.extinction_time
        assert tr.curve_times[-1] - tr.extinction_time <= 0.25


class TestEnsemble:
    def test_single_run_matches_trajectory(self):
        g = isolated(3)
        p = DiffusionParams(0.0, 1.0)
        s = run_ensemble(g, p, Strategy.none(), n_runs=1, base_seed=6,
                         horizon=200.0, sample_dt=1.0, keep_trajectories=True)
        tr = simulate(g, p, Strategy.none(), seed=6, horizon=200.0,
                      sample_dt=1.0)
        assert s.mean_extinction_time == tr.extinction_time
        assert s.extinction_fraction == 1.0
        assert np.array_equal(s.trajectories[0].times, tr.times)
        assert np.array_equal(s.mean_curve[:tr.curve_counts.size],
                              tr.curve_counts.astype(float))

    def test_deterministic_and_jobs_invariant(self):
        g = gen_erdos_renyi(15, 0.2, seed=4)
        p = DiffusionParams(beta=0.3, delta=1.0, rho=1.0, budget=1)
        s = Strategy.priority(LinearArrangement.identity(15))
        a = run_ensemble(g, p, s, n_runs=24, base_seed=9, jobs=1)
        b = run_ensemble(g, p, s, n_runs=24, base_seed=9, jobs=4)
        assert np.array_equal(a.extinction_times, b.extinction_times,
                              equal_nan=True)
        assert np.array_equal(a.mean_curve, b.mean_curve)
        assert a.mean_extinction_time == b.mean_extinction_time

    def test_extinction_fraction_when_subcritical(self):
        s = run_ensemble(isolated(10), DiffusionParams(0.0, 1.0),
                         Strategy.none(), n_runs=2000, base_seed=15,
                         horizon=20.0)
        assert s.extinction_fraction >= 0.99

    def test_censoring(self):
        s = run_ensemble(isolated(1), DiffusionParams(0.0, 1.0),
                         Strategy.none(), n_runs=2000, base_seed=16,
                         horizon=0.05)
        expect = 1.0 - np.exp(-0.05)
        assert abs(s.extinction_fraction - expect) < 0.03
        assert s.n_censored == np.isnan(s.extinction_times).sum()
        assert s.mean_extinction_time <= 0.05 + 1e-12

    def test_mean_curve_pools_extinct_runs_as_zero(self):
        s = run_ensemble(isolated(2), DiffusionParams(0.0, 1.0),
                         Strategy.none(), n_runs=50, base_seed=17,
                         horizon=50.0, sample_dt=0.5)
        assert s.mean_curve[0] == 2.0
        assert (np.diff(s.mean_curve) <= 1e-12).all()
        assert s.mean_curve[-1] == 0.0


class TestMonotonicity:
    def test_nested_initial_sets(self):
        # more initial infections cannot shorten the epidemic: compare a
        # 5-node seed set against a 10-node superset
        g = gen_erdos_renyi(20, 0.2, seed=5)
        la, _ = order_mcm(g, MCMConfig(seed=1))
        p = DiffusionParams(beta=0.3, delta=1.0, rho=2.0, budget=1)
        small = np.zeros(20, dtype=bool)
        small[:5] = True
        big = np.zeros(20, dtype=bool)
        big[:10] = True
        s_small = run_ensemble(g, p, Strategy.priority(la), initial=small,
                               n_runs=2000, base_seed=30)
        s_big = run_ensemble(g, p, Strategy.priority(la), initial=big,
                             n_runs=2000, base_seed=40)
        pooled = np.sqrt(s_small.se_extinction_time**2
                         + s_big.se_extinction_time**2)
        assert (s_small.mean_extinction_time
                <= s_big.mean_extinction_time + 3 * pooled)
