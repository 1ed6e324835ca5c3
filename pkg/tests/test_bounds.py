import math

import numpy as np
import pytest

from cutplan.arrangement import LinearArrangement, order_exact_min_cutwidth
from cutplan.bounds import (
    BoundReport,
    ProbeSettings,
    ThresholdEstimate,
    ThresholdSearchError,
    estimate_threshold,
    expected_threshold,
    solve_xi,
    theorem1_bound,
)
from cutplan.graph import Graph, gen_erdos_renyi

# frozen oracle values, computed independently with scipy.optimize.brentq
# and direct float evaluation of the closed forms
EPS_1000 = 0.7907755278982137
RHO_MIN_1000 = 35691.86734383249
BOUND_1000 = 0.23211912905430226
XI_1 = 2.146193220620584
XI_100 = 104.66022855484997


def path_graph(n):
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


class TestTheorem1Bound:
    def test_reference_point(self):
        rep = theorem1_bound(n=1000, d_max=100, c_max=1000, beta=10.0,
                             delta=1.0, rho=40000.0)
        assert rep.epsilon == pytest.approx(EPS_1000, rel=1e-14)
        assert rep.condition_holds
        assert rep.extinction_bound == pytest.approx(BOUND_1000, rel=1e-12)
        # the condition flips exactly at rho = beta*c*s - delta
        at = theorem1_bound(1000, 100, 1000, 10.0, 1.0,
                            RHO_MIN_1000 * (1 + 1e-12))
        below = theorem1_bound(1000, 100, 1000, 10.0, 1.0,
                               RHO_MIN_1000 * (1 - 1e-12))
        assert at.condition_holds and not below.condition_holds
        assert math.isinf(below.extinction_bound)

    def test_corollary_matches_condition(self):
        # e* cap restates the rate condition: rho/delta > r*c*s - 1
        rep = theorem1_bound(200, 7, 40, 0.5, 2.0, 100.0)
        s = (1 + 2 * math.sqrt(rep.epsilon) + rep.epsilon)
        assert rep.corollary_threshold == pytest.approx(
            (0.5 / 2.0) * 40 * s - 1, rel=1e-14)

    def test_beta_zero_always_holds(self):
        rep = theorem1_bound(50, 3, 10, 0.0, 1.0, 0.0)
        assert rep.condition_holds
        assert rep.extinction_bound == pytest.approx(50.0)
        assert rep.naive_threshold == 0.0

    def test_degenerate_no_edges(self):
        rep = theorem1_bound(10, 0, 0, 5.0, 1.0, 3.0)
        assert rep.degenerate
        assert rep.condition_holds
        assert rep.extinction_bound == pytest.approx(10.0 / 4.0)
        assert rep.corollary_threshold == 0.0
        assert rep.naive_threshold == 0.0
        assert math.isinf(rep.epsilon)

    def test_bound_finite_iff_condition(self):
        for rho in (0.0, 1.0, 50.0, 1e4, 1e6):
            rep = theorem1_bound(100, 10, 30, 2.0, 1.0, rho)
            assert rep.condition_holds == math.isfinite(rep.extinction_bound)
            assert rep.epsilon > 0

    def test_more_treatment_tightens_bound(self):
        a = theorem1_bound(100, 10, 30, 2.0, 1.0, 1e5)
        b = theorem1_bound(100, 10, 30, 2.0, 1.0, 2e5)
        assert b.extinction_bound < a.extinction_bound

    def test_naive_threshold_scales_with_budget(self):
        rep = theorem1_bound(100, 10, 30, 2.0, 1.0, 0.0, b_tot=5)
        assert rep.naive_threshold == pytest.approx(2.0 * 30 / 5)

    def test_validation(self):
        with pytest.raises(ValueError):
            theorem1_bound(1, 1, 1, 1.0, 1.0, 0.0)
        with pytest.raises(ValueError):
            theorem1_bound(10, 1, 1, 1.0, 0.0, 0.0)
        with pytest.raises(ValueError):
            theorem1_bound(10, 1, -1, 1.0, 1.0, 0.0)
        with pytest.raises(ValueError):
            theorem1_bound(10, 0, 5, 1.0, 1.0, 0.0)
        with pytest.raises(ValueError):
            theorem1_bound(10, 1, 1, -1.0, 1.0, 0.0)
        with pytest.raises(ValueError):
            theorem1_bound(10, 1, 1, 1.0, 1.0, -1.0)
        with pytest.raises(ValueError):
            theorem1_bound(10, 1, 1, 1.0, 1.0, 0.0, b_tot=0)


class TestSolveXi:
    def test_zero(self):
        assert solve_xi(0.0) == 0.0

    def test_frozen_roots(self):
        assert solve_xi(1.0) == pytest.approx(XI_1, abs=1e-10)
        assert solve_xi(100.0) == pytest.approx(XI_100, abs=1e-10)

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            solve_xi(-1e-9)

    def test_residual_and_cap_log_uniform(self):
        rng = np.random.default_rng(3)
        a = 10.0 ** rng.uniform(-6, 6, size=200)
        for ai in a:
            xi = solve_xi(float(ai))
            # (xi - ai) first: exact for xi near ai, so the residual stays
            # meaningful when ai is large enough that xi - log1p(xi) loses bits
            assert abs((xi - ai) - math.log1p(xi)) <= 1e-10
            assert xi <= ai + 2.0 * math.sqrt(ai)


class TestExpectedThreshold:
    def test_reference_rows(self):
        assert expected_threshold(0.1, 71956, 100) == 71.956
        assert expected_threshold(0.1, 349440, 100) == 349.44

    def test_no_cut_no_threshold(self):
        assert expected_threshold(2.5, 0, 3) == 0.0

    def test_validation(self):
        with pytest.raises(ValueError):
            expected_threshold(1.0, 10, 0)


class TestEstimateThreshold:
    def test_edgeless_graph_bracket_is_zero(self):
        g = Graph(10, [])
        est = estimate_threshold(g, LinearArrangement.identity(10), r=3.0,
                                 seed=1)
        assert est.e_star == 0.0
        assert est.bracket == (0.0, 0.0)
        assert est.probes[0].success

    def test_path_threshold_small(self):
        g = path_graph(20)
        la, c = order_exact_min_cutwidth(Graph(8, [(i, i + 1) for i in range(7)]))
        assert c == 1  # sanity on the solver for paths
        order = LinearArrangement.identity(20)  # identity is optimal: C = 1
        est = estimate_threshold(g, order, r=1.0, b_tot=1, seed=7)
        assert est.e_star <= 5.0
        assert est.bracket[1] - est.bracket[0] <= est.tol + 1e-12

    def test_bracket_and_probe_integrity(self):
        g = gen_erdos_renyi(30, 0.3, seed=2)
        est = estimate_threshold(g, LinearArrangement.identity(30), r=5.0,
                                 b_tot=1, seed=3)
        lo, hi = est.bracket
        assert 0.0 <= lo < hi == est.e_star
        assert hi - lo <= est.tol + 1e-12
        for p in est.probes:
            assert 0 < p.n_executed <= est.n_runs
            assert 0.0 <= p.extinction_fraction <= 1.0
            assert p.success == (p.n_executed == est.n_runs
                                 and p.n_extinct >= math.ceil(
                                     0.8 * est.n_runs - 1e-9))

    def test_deterministic(self):
        g = gen_erdos_renyi(25, 0.2, seed=5)
        la = LinearArrangement.identity(25)
        a = estimate_threshold(g, la, r=2.0, seed=11)
        b = estimate_threshold(g, la, r=2.0, seed=11)
        assert a.e_star == b.e_star and a.bracket == b.bracket
        assert [p.extinction_fraction for p in a.probes] == \
               [p.extinction_fraction for p in b.probes]

    def test_jobs_invariant(self):
        g = gen_erdos_renyi(25, 0.2, seed=5)
        la = LinearArrangement.identity(25)
        a = estimate_threshold(g, la, r=2.0, seed=11, jobs=1)
        b = estimate_threshold(g, la, r=2.0, seed=11, jobs=4)
        assert a.e_star == b.e_star
        assert [p.n_executed for p in a.probes] == \
               [p.n_executed for p in b.probes]

    def test_budget_monotone(self):
        g = gen_erdos_renyi(25, 0.25, seed=8)
        la = LinearArrangement.identity(25)
        tol = 0.5
        e1 = estimate_threshold(g, la, r=4.0, b_tot=1, tol=tol, seed=13)
        e2 = estimate_threshold(g, la, r=4.0, b_tot=3, tol=tol, seed=13)
        assert e2.e_star <= e1.e_star + 2 * tol

    def test_unattainable_criterion_raises(self):
        g = gen_erdos_renyi(20, 0.3, seed=4)
        la = LinearArrangement.identity(20)
        probe = ProbeSettings(n_runs=10, horizon_multiplier=1e-4,
                              success_fraction=1.0)
        with pytest.raises(ThresholdSearchError) as exc:
            estimate_threshold(g, la, r=1.0, probe=probe, seed=9)
        assert len(exc.value.probes) >= 1
        assert not exc.value.probes[-1].success

    def test_validation(self):
        g = path_graph(5)
        la = LinearArrangement.identity(5)
        with pytest.raises(ValueError):
            estimate_threshold(g, la, r=0.0)
        with pytest.raises(ValueError):
            estimate_threshold(g, la, r=1.0, b_tot=0)
        with pytest.raises(ValueError):
            estimate_threshold(g, la, r=1.0, tol=0.0)
        with pytest.raises(ValueError):
            ProbeSettings(n_runs=0)
        with pytest.raises(ValueError):
            ProbeSettings(success_fraction=1.5)
