import math

import numpy as np
import pytest

from diffnet.correlation import ensure_psd
from diffnet.solver import (
    PenaltyParams,
    SolverError,
    objective_value,
    prox_group_lasso,
    soft_threshold,
    solve_jgl,
)


def prox_oracle_cvxpy(v, t1, t2):
    """Numerical minimizer of 0.5||x-v||^2 + t1||x||_1 + t2||x||_2 via cvxpy."""
    import cvxpy as cp

    x = cp.Variable(len(v))
    objective = 0.5 * cp.sum_squares(x - np.asarray(v)) + t1 * cp.norm1(x) + t2 * cp.norm2(x)
    problem = cp.Problem(cp.Minimize(objective))
    problem.solve(
        solver=cp.CLARABEL,
        tol_gap_abs=1e-12,
        tol_gap_rel=1e-12,
        tol_feas=1e-12,
        tol_ktratio=1e-9,
    )
    if problem.status != cp.OPTIMAL:
        problem.solve(solver=cp.SCS, eps=1e-11, max_iters=200_000)
    return np.asarray(x.value).ravel()


def random_correlation(rng, p):
    a = rng.standard_normal((p + 5, p))
    c = np.corrcoef(a, rowvar=False)
    return ensure_psd((c + c.T) / 2, 1e-8)


class TestSoftThreshold:
    @pytest.mark.parametrize(
        "x,t,expected",
        [(3.0, 1.0, 2.0), (-0.5, 1.0, 0.0), (-2.5, 1.5, -1.0), (0.0, 0.5, 0.0)],
    )
    def test_values(self, x, t, expected):
        assert soft_threshold(x, t) == expected

    def test_array(self):
        out = soft_threshold(np.array([3.0, -0.5, -2.5]), 1.0)
        assert np.array_equal(out, [2.0, 0.0, -1.5])

    def test_negative_threshold_rejected(self):
        with pytest.raises(ValueError):
            soft_threshold(1.0, -0.1)


class TestProxGroupLasso:
    def test_zero_fixed_point(self):
        assert np.array_equal(prox_group_lasso([0.0, 0.0], 0.7, 0.3), [0.0, 0.0])

    def test_shrink_then_scale(self):
        # soft threshold gives (3, 0); norm 3 > 1 so scale by 2/3
        out = prox_group_lasso([4.0, 0.0], 1.0, 1.0)
        assert out == pytest.approx([2.0, 0.0], abs=1e-12)

    def test_group_kill_at_boundary(self):
        # soft threshold gives (1, -1) with norm sqrt(2) = t2: whole group dies
        out = prox_group_lasso([2.0, -2.0], 1.0, math.sqrt(2.0))
        assert np.array_equal(out, [0.0, 0.0])

    def test_lambda2_zero_equals_soft_threshold(self):
        rng = np.random.default_rng(41)
        for _ in range(200):
            k = int(rng.integers(1, 6))
            v = rng.standard_normal(k) * 3
            t1 = float(rng.uniform(0, 2))
            assert np.array_equal(
                prox_group_lasso(v, t1, 0.0), soft_threshold(v, t1)
            )

    def test_matches_cvxpy_oracle(self):
        rng = np.random.default_rng(42)
        for _ in range(60):
            k = int(rng.choice([1, 2, 5]))
            v = rng.standard_normal(k) * 3
            t1 = float(rng.uniform(0, 2))
            t2 = float(rng.uniform(0, 2))
            ours = prox_group_lasso(v, t1, t2)
            oracle = prox_oracle_cvxpy(v, t1, t2)
            assert ours == pytest.approx(oracle, abs=1e-6)


class TestThetaUpdate:
    def test_scalar_stationarity(self):
        # rho=1, Z-U=0, Sigma=1: solve theta - 1/theta = -1
        from diffnet.solver import _theta_update

        theta = _theta_update(np.array([[-1.0]]), 1.0, 1.0)
        assert theta[0, 0] == pytest.approx((math.sqrt(5.0) - 1.0) / 2.0, abs=1e-12)

    def test_scalar_matches_numerical_minimum(self):
        from scipy.optimize import minimize_scalar

        from diffnet.solver import _theta_update

        rng = np.random.default_rng(43)
        for _ in range(20):
            rho = float(rng.uniform(0.2, 3.0))
            a = float(rng.uniform(-2.0, 2.0))
            theta = _theta_update(np.array([[a]]), rho, 1.0)[0, 0]
            res = minimize_scalar(
                lambda t: -math.log(t) + rho / 2 * t * t - a * t,
                bounds=(1e-8, 50.0),
                method="bounded",
                options={"xatol": 1e-10},
            )
            assert theta == pytest.approx(res.x, abs=1e-6)


class TestObjectiveValue:
    def test_identity_single(self):
        p = 4
        assert objective_value([np.eye(p)], [np.eye(p)], 0.0, 0.0) == pytest.approx(-p)

    def test_identity_pair_with_penalty(self):
        p = 3
        val = objective_value([np.eye(p), np.eye(p)], [np.eye(p), np.eye(p)], 1.0, 0.4)
        assert val == pytest.approx(-2 * p)

    def test_matches_direct_reimplementation(self):
        rng = np.random.default_rng(44)
        for _ in range(10):
            p, k = 5, 3
            thetas = [random_correlation(rng, p) + 0.5 * np.eye(p) for _ in range(k)]
            corrs = [random_correlation(rng, p) for _ in range(k)]
            l1 = float(rng.uniform(0, 1))
            l2 = float(rng.uniform(0, 1))
            expected = 0.0
            for t, s in zip(thetas, corrs):
                expected += math.log(np.linalg.det(t)) - np.trace(s @ t)
            pen = 0.0
            for i in range(p):
                for j in range(p):
                    if i == j:
                        continue
                    pen += (1 - l2) * sum(abs(t[i, j]) for t in thetas)
                    pen += l2 * math.sqrt(sum(t[i, j] ** 2 for t in thetas))
            expected -= l1 * pen
            assert objective_value(thetas, corrs, l1, l2) == pytest.approx(
                expected, rel=1e-9
            )

    def test_rejects_non_pd(self):
        with pytest.raises(ValueError, match="positive definite"):
            objective_value([np.diag([1.0, -1.0])], [np.eye(2)], 0.0, 0.0)


class TestSolveJgl:
    def test_scalar_identity(self):
        params = PenaltyParams(0.0, 0.0, tol=1e-8)
        result = solve_jgl([np.array([[1.0]])], params)
        assert result.converged
        assert result.thetas[0][0, 0] == pytest.approx(1.0, abs=1e-4)

    def test_lambda2_one_identical_supports(self):
        rng = np.random.default_rng(45)
        sigma = random_correlation(rng, 8)
        params = PenaltyParams(0.3, 1.0)
        result = solve_jgl([sigma, sigma], params)
        s0 = result.thetas[0] != 0
        s1 = result.thetas[1] != 0
        assert np.array_equal(s0, s1)
        assert result.thetas[0] == pytest.approx(result.thetas[1], abs=1e-4)

    def test_lambda2_one_different_data_same_support(self):
        rng = np.random.default_rng(46)
        corrs = [random_correlation(rng, 10) for _ in range(2)]
        result = solve_jgl(corrs, PenaltyParams(0.3, 1.0))
        assert np.array_equal(result.thetas[0] != 0, result.thetas[1] != 0)

    def test_returned_thetas_pd_and_symmetric(self):
        rng = np.random.default_rng(47)
        for _ in range(5):
            corrs = [random_correlation(rng, 12) for _ in range(2)]
            result = solve_jgl(corrs, PenaltyParams(0.4, 0.5))
            for theta in result.thetas:
                assert np.array_equal(theta, theta.T)
                assert np.linalg.eigvalsh(theta).min() > 0

    def test_converged_run_residuals(self):
        rng = np.random.default_rng(48)
        corrs = [random_correlation(rng, 10) for _ in range(2)]
        result = solve_jgl(corrs, PenaltyParams(0.3, 0.5, tol=1e-5, max_iters=2000))
        assert result.converged
        assert max(result.final_residuals) < 1e-5
        assert result.iterations <= 2000

    def test_condition_permutation_symmetry(self):
        rng = np.random.default_rng(49)
        corrs = [random_correlation(rng, 9) for _ in range(3)]
        params = PenaltyParams(0.25, 0.6)
        fwd = solve_jgl(corrs, params)
        rev = solve_jgl(corrs[::-1], params)
        for a, b in zip(fwd.thetas, rev.thetas[::-1]):
            assert np.array_equal(a, b)

    def test_objective_improves_on_identity_start(self):
        rng = np.random.default_rng(50)
        for _ in range(5):
            corrs = [random_correlation(rng, 8) for _ in range(2)]
            l1, l2 = 0.2, 0.4
            result = solve_jgl(corrs, PenaltyParams(l1, l2))
            assert result.converged
            at_solution = objective_value(result.thetas, corrs, l1, l2)
            at_identity = objective_value(
                [np.eye(8), np.eye(8)], corrs, l1, l2
            )
            assert at_solution >= at_identity

    def test_lambda2_zero_matches_independent_graphical_lasso(self):
        from sklearn.covariance import graphical_lasso

        rng = np.random.default_rng(51)
        agreements = []
        for _ in range(10):
            p = 20
            a = rng.standard_normal((60, p))
            cov = np.cov(a, rowvar=False)
            d = np.sqrt(np.diag(cov))
            corr = cov / np.outer(d, d)
            corrs = [ensure_psd(corr, 1e-8), random_correlation(rng, p)]
            lam = 0.3
            result = solve_jgl(corrs, PenaltyParams(lam, 0.0, tol=1e-6, max_iters=3000))
            for k in range(2):
                _, prec = graphical_lasso(corrs[k], alpha=lam, tol=1e-10, max_iter=500)
                ref_support = np.abs(prec) > 1e-6
                np.fill_diagonal(ref_support, True)
                ours = result.thetas[k] != 0
                agreements.append((ours == ref_support).mean())
        assert np.mean(agreements) >= 0.99

    def test_trace_lengths_match_iterations(self):
        rng = np.random.default_rng(52)
        corrs = [random_correlation(rng, 6) for _ in range(2)]
        result = solve_jgl(corrs, PenaltyParams(0.3, 0.5), collect_trace=True)
        assert len(result.trace.objective) == result.iterations
        assert len(result.trace.primal) == result.iterations
        assert len(result.trace.dual) == result.iterations

    def test_nonconvergence_flagged(self):
        rng = np.random.default_rng(53)
        corrs = [random_correlation(rng, 10) for _ in range(2)]
        result = solve_jgl(corrs, PenaltyParams(0.3, 0.5, max_iters=3))
        assert not result.converged
        assert result.iterations == 3

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="matrix"):
            solve_jgl([np.eye(3), np.eye(4)], PenaltyParams(0.1, 0.1))

    def test_sample_weighting_changes_balance(self):
        rng = np.random.default_rng(54)
        corrs = [random_correlation(rng, 8) for _ in range(2)]
        params = PenaltyParams(0.3, 0.0)
        unweighted = solve_jgl(corrs, params)
        weighted = solve_jgl(corrs, params, weights=[5.0, 1.0])
        # heavier likelihood weight on condition 0 retains more of its edges
        n_un = (unweighted.thetas[0] != 0).sum()
        n_w = (weighted.thetas[0] != 0).sum()
        assert n_w >= n_un


class TestPenaltyParams:
    def test_validation(self):
        with pytest.raises(ValueError):
            PenaltyParams(-0.1, 0.5)
        with pytest.raises(ValueError):
            PenaltyParams(0.1, 1.5)
        with pytest.raises(ValueError):
            PenaltyParams(0.1, 0.5, rho=0.0)
        with pytest.raises(ValueError):
            PenaltyParams(0.1, 0.5, max_iters=0)
        with pytest.raises(ValueError):
            PenaltyParams(0.1, 0.5, tol=0.0)
