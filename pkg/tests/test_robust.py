import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from robust_ircw import (
    CnrProfile,
    DimensionError,
    DomainError,
    InverseCnrs,
    ObjectiveConfig,
    PowerAllocation,
    PreconditionError,
    ResponsePoint,
    RobustSolution,
    UncertaintyClass,
    closed_form_power,
    kkt_residual,
    solve_robust,
    solve_robust_cnr,
    verify_saddle_point,
    verify_worst_allocation,
    waterfill,
    weighted_log_sum,
    worst_allocation_condition,
)
from robust_ircw.ofdm_model import NoiseModel
from robust_ircw.robust import simplex_grid

from helpers import unit_cfg, unit_grid
from oracles import enumerate_simplex, grid_max_separable, joint_terms, joint_value

# 1e-4-step grid maximizer for nu = [1, 2, 4], varpi = [4, 2, 1], alpha' = beta' = 0.5
GRID_ORACLE_P = np.array([0.3402, 0.3196, 0.3402])
GRID_ORACLE_VALUE = 1.6460277191460788


def cnr_profiles(min_size=1, max_size=5, lo=0.1, hi=10.0):
    def build(n):
        vec = arrays(np.float64, n, elements=st.floats(lo, hi))
        return st.tuples(vec, vec).map(lambda t: CnrProfile(*t))

    return st.integers(min_size, max_size).flatmap(build)


weights = st.floats(0.0, 1.0)


class TestClosedForm:
    inv = InverseCnrs([1.0, 0.5, 0.25], [0.2, 1.0, 2.0])

    @pytest.mark.parametrize("mu", [0.1, 0.7, 1.5, 4.0, 30.0])
    def test_radar_reduction(self, mu):
        cfg = unit_cfg(0.0)
        expected = np.maximum(mu * cfg.alpha - self.inv.radar_inv, 0.0)
        np.testing.assert_allclose(closed_form_power(mu, self.inv, cfg), expected, atol=1e-14)

    @pytest.mark.parametrize("mu", [0.1, 0.7, 1.5, 4.0, 30.0])
    def test_comm_reduction(self, mu):
        cfg = unit_cfg(1.0)
        expected = np.maximum(mu * cfg.beta - self.inv.comm_inv, 0.0)
        np.testing.assert_allclose(closed_form_power(mu, self.inv, cfg), expected, atol=1e-14)

    def test_small_mu(self):
        np.testing.assert_array_equal(closed_form_power(1e-9, self.inv, unit_cfg(0.4)), 0.0)

    def test_rejects_nonpositive_mu(self):
        with pytest.raises(DomainError):
            closed_form_power(0.0, self.inv, unit_cfg(0.4))

    @settings(max_examples=60, deadline=None)
    @given(cnr_profiles(), weights, st.floats(1e-3, 50.0), st.floats(1.0, 2.0))
    def test_monotone_in_mu(self, cnr, wc, mu, factor):
        inv = InverseCnrs.from_cnr(cnr)
        cfg = unit_cfg(wc)
        lo = closed_form_power(mu, inv, cfg)
        hi = closed_form_power(mu * factor, inv, cfg)
        assert np.all(lo >= 0)
        assert np.all(hi >= lo - 1e-12 * np.maximum(1.0, hi))

    @settings(max_examples=60, deadline=None)
    @given(cnr_profiles(), weights, st.floats(1e-2, 50.0))
    def test_satisfies_stationarity(self, cnr, wc, mu):
        # every positive entry solves alpha'/(nu'+p) + beta'/(w'+p) = 1/mu'
        inv = InverseCnrs.from_cnr(cnr)
        cfg = unit_cfg(wc)
        p = closed_form_power(mu, inv, cfg)
        g = cfg.alpha / (inv.radar_inv + p) + cfg.beta / (inv.comm_inv + p)
        on = p > 1e-12
        np.testing.assert_allclose(g[on] * mu, 1.0, rtol=1e-9)
        assert np.all(g[~on] * mu <= 1.0 + 1e-9)


class TestSolveRobust:
    def test_three_subcarrier_example(self):
        nu, w = np.array([1.0, 2.0, 4.0]), np.array([4.0, 2.0, 1.0])
        sol = solve_robust_cnr(CnrProfile(nu, w), unit_cfg(0.5))
        assert np.max(np.abs(sol.allocation.powers - GRID_ORACLE_P)) <= 2e-3
        assert sol.worst_case_value >= GRID_ORACLE_VALUE - 1e-6
        # exact symmetry of the instance
        assert sol.allocation.powers[0] == pytest.approx(sol.allocation.powers[2], abs=1e-12)

    @settings(max_examples=60, deadline=None)
    @given(cnr_profiles(), st.sampled_from([0.0, 1.0]), st.floats(0.1, 5.0))
    def test_weight_degeneracy(self, cnr, wc, budget):
        sol = solve_robust_cnr(cnr, unit_cfg(wc), budget)
        target = cnr.radar_cnr if wc == 0.0 else cnr.comm_cnr
        ref = waterfill(target, budget).allocation.powers
        assert np.max(np.abs(sol.allocation.powers - ref)) <= 1e-9

    @settings(max_examples=60, deadline=None)
    @given(cnr_profiles(), weights, st.floats(0.05, 20.0))
    def test_budget_and_kkt(self, cnr, wc, budget):
        sol = solve_robust_cnr(cnr, unit_cfg(wc), budget)
        assert abs(sol.allocation.total - budget) <= 1e-10
        assert sol.kkt_residual <= 1e-7
        assert sol.multiplier > 0

    @settings(max_examples=40, deadline=None)
    @given(cnr_profiles(2, 4), weights)
    def test_grid_optimality(self, cnr, wc):
        cfg = unit_cfg(wc)
        sol = solve_robust_cnr(cnr, cfg)
        best, _ = grid_max_separable(joint_terms(cnr.radar_cnr, cnr.comm_cnr, cfg.alpha, cfg.beta), 1000)
        assert sol.worst_case_value >= best - 1e-6

    @settings(max_examples=40, deadline=None)
    @given(cnr_profiles(2, 5), weights, st.integers(0, 2**32 - 1))
    def test_dominates_alternatives_at_lower_bounds(self, cnr, wc, seed):
        cfg = unit_cfg(wc)
        sol = solve_robust_cnr(cnr, cfg)
        q = np.random.default_rng(seed).dirichlet(np.ones(len(cnr)), size=64)
        vals = joint_value(q, cnr.radar_cnr, cnr.comm_cnr, cfg.alpha, cfg.beta)
        assert np.all(vals <= sol.worst_case_value + 1e-12)

    @settings(max_examples=40, deadline=None)
    @given(cnr_profiles(2, 5), weights, st.randoms(use_true_random=False))
    def test_permutation_equivariance(self, cnr, wc, rnd):
        perm = np.array(rnd.sample(range(len(cnr)), len(cnr)))
        cfg = unit_cfg(wc)
        a = solve_robust_cnr(cnr, cfg).allocation.powers
        b = solve_robust_cnr(cnr.subset(perm), cfg).allocation.powers
        np.testing.assert_allclose(b, a[perm], atol=1e-9)

    def test_uses_lower_bounds_only(self):
        params = unit_grid(3)
        noise = NoiseModel.flat(3, 1.0, 1.0)
        cfg = unit_cfg(0.5)
        narrow = UncertaintyClass([1.0, 2.0, 3.0], [1.5, 2.5, 3.5], [0.5, 1.0, 2.0], [1.0, 1.5, 2.5])
        wide = UncertaintyClass([1.0, 2.0, 3.0], [9.0, 9.0, 9.0], [0.5, 1.0, 2.0], [9.0, 9.0, 9.0])
        a = solve_robust(params, noise, narrow, cfg).allocation.powers
        b = solve_robust(params, noise, wide, cfg).allocation.powers
        np.testing.assert_array_equal(a, b)

    def test_rejects_bad_budget(self):
        with pytest.raises(DomainError):
            solve_robust_cnr(CnrProfile([1.0], [1.0]), unit_cfg(0.5), 0.0)

    def test_baseline(self, baseline):
        params, noise, uclass, cfg = baseline
        sol = solve_robust(params, noise, uclass, cfg)
        assert sol.kkt_residual <= 1e-7
        assert abs(sol.allocation.total - 1.0) <= 1e-10


class TestKktResidual:
    def test_perturbed(self):
        cnr = CnrProfile([1.0, 2.0, 4.0], [4.0, 2.0, 1.0])
        cfg = unit_cfg(0.5)
        sol = solve_robust_cnr(cnr, cfg)
        p = sol.allocation.powers.copy()
        p[0] += 0.01
        p[1] -= 0.01
        bad = RobustSolution(PowerAllocation(p), sol.multiplier, sol.worst_case_value, 0.0)
        assert kkt_residual(bad, InverseCnrs.from_cnr(cnr), cfg) > 1e-4

    @pytest.mark.parametrize("budget", [0.3, 1.0, 4.0])
    def test_single_subcarrier(self, budget):
        nu, w = 3.0, 0.5
        cfg = unit_cfg(0.35, 1)
        sol = solve_robust_cnr(CnrProfile([nu], [w]), cfg, budget)
        assert sol.allocation.powers[0] == pytest.approx(budget, abs=1e-10)
        mu = cfg.alpha * nu / (1 + budget * nu) + cfg.beta * w / (1 + budget * w)
        assert 1.0 / sol.multiplier == pytest.approx(mu, rel=1e-9)
        assert sol.kkt_residual <= 1e-10

    def test_length_mismatch(self):
        sol = solve_robust_cnr(CnrProfile([1.0, 2.0], [1.0, 2.0]), unit_cfg(0.5, 2))
        with pytest.raises(DimensionError):
            kkt_residual(sol, InverseCnrs([1.0], [1.0]), unit_cfg(0.5, 2))


class TestSaddlePoint:
    def test_baseline(self, baseline):
        params, noise, uclass, cfg = baseline
        sol = solve_robust(params, noise, uclass, cfg)
        rep = verify_saddle_point(params, noise, uclass, cfg, sol, 100, 7)
        assert rep.passed
        assert rep.response_margin >= 0 and rep.allocation_margin >= 0

    def test_degenerate_class_margin_zero(self):
        params = unit_grid(3)
        noise = NoiseModel.flat(3, 1.0, 1.0)
        u = UncertaintyClass.degenerate(ResponsePoint([1.0, 2.0, 0.5], [3.0, 0.4, 1.0]))
        cfg = unit_cfg(0.6)
        sol = solve_robust(params, noise, u, cfg)
        rep = verify_saddle_point(params, noise, u, cfg, sol, 50, 1)
        assert rep.response_margin == 0.0
        assert rep.passed

    def test_reference_allocation_is_equality(self):
        cnr = CnrProfile([1.0, 2.0, 4.0], [4.0, 2.0, 1.0])
        cfg = unit_cfg(0.5)
        sol = solve_robust_cnr(cnr, cfg)
        v = weighted_log_sum(sol.allocation.powers, cnr.radar_cnr, cnr.comm_cnr, cfg.alpha, cfg.beta)
        assert float(v) == sol.worst_case_value

    def test_detects_bad_solution(self, baseline):
        params, noise, uclass, cfg = baseline
        bad = RobustSolution(PowerAllocation.uniform(params.n_subcarriers), 1.0, 0.0, 0.0)
        rep = verify_saddle_point(params, noise, uclass, cfg, bad, 200, 7)
        assert not rep.passed
        assert rep.allocation_violations > 0

    def test_deterministic(self, baseline):
        params, noise, uclass, cfg = baseline
        sol = solve_robust(params, noise, uclass, cfg)
        a = verify_saddle_point(params, noise, uclass, cfg, sol, 30, 3).to_dict()
        b = verify_saddle_point(params, noise, uclass, cfg, sol, 30, 3).to_dict()
        assert a == b


class TestWorstAllocation:
    def test_condition_separated(self):
        inv = InverseCnrs([0.01, 100.0], [0.01, 100.0])
        assert worst_allocation_condition(inv, unit_cfg(0.5, 2), 0) is True

    def test_condition_identical(self):
        inv = InverseCnrs([1.0, 1.0, 1.0], [1.0, 1.0, 1.0])
        assert worst_allocation_condition(inv, unit_cfg(0.5), 0) is False

    def test_condition_hand_values(self):
        # alpha' = beta' = 1: left side 0.02, right side 2/1.01
        cfg = ObjectiveConfig.from_params(unit_grid(2), 0.5, 0.25 / math.log(2), 0.5 / math.log(2))
        assert cfg.alpha == pytest.approx(1.0) and cfg.beta == pytest.approx(1.0)
        inv = InverseCnrs([0.01, 100.0], [0.01, 100.0])
        assert worst_allocation_condition(inv, cfg, 0)
        assert not worst_allocation_condition(inv, cfg, 1)

    def test_condition_index_range(self):
        with pytest.raises(DimensionError):
            worst_allocation_condition(InverseCnrs([1.0], [1.0]), unit_cfg(0.5, 1), 3)

    def test_concentrates_when_condition_holds(self):
        nu = np.array([1e-3, 50.0, 80.0])
        w = np.array([2e-3, 40.0, 90.0])
        cfg = unit_cfg(0.5)
        # the condition compares zero-power gains elsewhere with the full-power gain at m1
        inv = InverseCnrs(nu, w)
        assert worst_allocation_condition(inv, cfg, 0)
        sol = solve_robust_cnr(inv.to_cnr(), cfg)
        assert sol.allocation.powers[0] >= 1 - 1e-9

    def test_brute_force_example(self):
        rep = verify_worst_allocation(CnrProfile([1.0, 3.0], [2.0, 5.0]), unit_cfg(0.5, 2), 1e-3)
        assert rep.passed
        assert rep.minimizer == 0
        assert rep.n_grid_points == 1001

    def test_equal_cnrs(self):
        cnr = CnrProfile([2.0, 2.0], [3.0, 3.0])
        cfg = unit_cfg(0.5, 2)
        rep = verify_worst_allocation(cnr, cfg, 0.5)
        concentrated = joint_value([1.0, 0.0], cnr.radar_cnr, cnr.comm_cnr, cfg.alpha, cfg.beta)
        uniform = joint_value([0.5, 0.5], cnr.radar_cnr, cnr.comm_cnr, cfg.alpha, cfg.beta)
        assert rep.passed and concentrated < uniform

    def test_zero_budget(self):
        rep = verify_worst_allocation(CnrProfile([1.0, 3.0], [2.0, 5.0]), unit_cfg(0.5, 2), 0.1, budget=0.0)
        assert rep.passed and rep.min_gap == 0.0

    def test_no_joint_minimizer(self):
        with pytest.raises(PreconditionError):
            verify_worst_allocation(CnrProfile([1.0, 3.0], [5.0, 2.0]), unit_cfg(0.5, 2), 1e-2)

    def test_too_many_subcarriers(self):
        with pytest.raises(PreconditionError):
            verify_worst_allocation(CnrProfile(np.arange(1.0, 6.0), np.arange(1.0, 6.0)), unit_cfg(0.5, 5), 0.1)

    @settings(max_examples=30, deadline=None)
    @given(cnr_profiles(2, 3), weights)
    def test_agrees_with_enumeration(self, cnr, wc):
        nu, w = cnr.radar_cnr, cnr.comm_cnr
        assume(np.argmin(nu) == np.argmin(w))
        cfg = unit_cfg(wc, len(cnr))
        rep = verify_worst_allocation(cnr, cfg, 0.02)
        pts = enumerate_simplex(len(cnr), 50)
        vals = joint_value(pts, nu, w, cfg.alpha, cfg.beta)
        assert rep.passed == bool(np.all(vals >= rep.worst_value - 1e-12))
        assert rep.n_grid_points == len(pts)


class TestSimplexGrid:
    @pytest.mark.parametrize("n,d", [(1, 5), (2, 7), (3, 10), (4, 6)])
    def test_counts_and_sums(self, n, d):
        from math import comb

        rows = np.concatenate(list(simplex_grid(n, d, chunk=7)))
        assert rows.shape == (comb(d + n - 1, n - 1), n)
        assert np.all(rows.sum(axis=1) == d)
        assert len({tuple(r) for r in rows}) == rows.shape[0]
