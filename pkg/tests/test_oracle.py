import numpy as np
import pytest

from infoacq.catalog import exchangeable_problem, random_problem
from infoacq.core import validate_problem
from infoacq.costs import chi2_cost, mutual_information_cost
from infoacq.oracle import (
    apu_perturbation_from_transform,
    apu_solve,
    brute_force_solve,
    salience_adjusted_perturbation,
    verify_focs,
)
from infoacq.solver import SolveOptions, multiplier_bounds, solve
from infoacq.transform import chi2


class TestBruteForce:
    def test_identical_actions_attain_common_payoff(self):
        pay = [0.3, -0.1]
        p = validate_problem(["s0", "s1"], [0.5, 0.5], [("a", pay), ("b", pay)])
        m = mutual_information_cost(p.prior, 1.0)
        res = brute_force_solve(p, m, 0.05)
        assert res.value == pytest.approx(float(p.prior @ np.array(pay)), abs=1e-12)

    def test_grid_step_must_divide_one(self):
        p = validate_problem(["s0", "s1"], [0.5, 0.5], [("a", [1, 0]), ("b", [0, 1])])
        with pytest.raises(Exception, match="divide"):
            brute_force_solve(p, mutual_information_cost(p.prior, 1.0), 0.03)

    def test_matches_solver_on_entropy_cost(self):
        rng = np.random.default_rng(0)
        p = random_problem(rng, 2, 2)
        m = mutual_information_cost(p.prior, 1.0)
        sol = solve(p, m)
        res = brute_force_solve(p, m, 0.01)
        assert abs(res.value - sol.value) < 2e-4
        assert res.value <= sol.value + 10 * 1e-8

    def test_matches_solver_on_quadratic_cost(self):
        rng = np.random.default_rng(1)
        p = random_problem(rng, 2, 2)
        m = chi2_cost(p.prior, 1.0)
        sol = solve(p, m)
        res = brute_force_solve(p, m, 0.01)
        assert abs(res.value - sol.value) < 2e-4
        assert res.value <= sol.value + 10 * 1e-8


class TestVerifyFocs:
    def test_converged_solution_passes(self):
        rng = np.random.default_rng(2)
        p = random_problem(rng, 2, 3)
        m = chi2_cost(p.prior, 1.0)
        sol = solve(p, m)
        rep = verify_focs(p, m, sol.alpha, sol.lam, sol.box)
        assert rep.within(1e-8)
        assert rep.in_box

    def test_arbitrary_point_fails(self):
        rng = np.random.default_rng(3)
        p = random_problem(rng, 2, 3)
        m = chi2_cost(p.prior, 1.0)
        alpha = np.full(3, 1 / 3)
        lam = np.array([0.3, -0.2])
        rep = verify_focs(p, m, alpha, lam)
        assert not rep.within(1e-6)

    def test_hand_built_saddle_from_closed_forms(self):
        p = exchangeable_problem([1.0, 0.0], 2)
        alpha = np.full(2, 0.5)
        lse = np.log(np.exp(p.payoffs.T) @ alpha)
        lam = p.prior * lse
        m = mutual_information_cost(p.prior, 1.0)
        rep = verify_focs(p, m, alpha, lam, multiplier_bounds(p, m))
        assert rep.residual_alpha < 1e-9 and rep.residual_lambda < 1e-9


class TestPerStatePerturbedChoice:
    def test_entropy_perturbation_reduces_to_logit(self):
        rng = np.random.default_rng(4)
        payoffs = rng.uniform(-1, 1, size=(3, 2))
        kappa = 0.7

        def c(t):
            t = np.asarray(t, dtype=float)
            return kappa * np.where(t > 0, t * np.log(np.where(t > 0, t, 1.0)) - t + 1, 1.0)

        def c_prime(t):
            return kappa * np.log(np.asarray(t, dtype=float))

        rows = apu_solve(payoffs, c, c_prime)
        expected = np.exp(payoffs.T / kappa)
        expected /= expected.sum(axis=1, keepdims=True)
        np.testing.assert_allclose(rows, expected, atol=1e-8)

    def test_identical_payoffs_give_uniform_choice(self):
        payoffs = np.zeros((4, 2))
        c, cp = apu_perturbation_from_transform(chi2(1.0), 4)
        rows = apu_solve(payoffs, c, cp)
        np.testing.assert_allclose(rows, 0.25, atol=1e-9)

    def test_exchangeable_match_with_saddle_solution(self):
        p = exchangeable_problem([0.9, 0.1], 3)
        t = chi2(1.0)
        sol = solve(p, chi2_cost(p.prior, 1.0), SolveOptions(backend="best_response"))
        c, cp = apu_perturbation_from_transform(t, 3)
        rows = apu_solve(p.payoffs, c, cp)
        np.testing.assert_allclose(rows, sol.rule.rows, atol=1e-6)

    def test_salience_adjusted_form_reproduces_any_solution(self):
        rng = np.random.default_rng(5)
        p = random_problem(rng, 2, 3)
        t = chi2(1.0)
        sol = solve(p, chi2_cost(p.prior, 1.0), SolveOptions(backend="best_response"))
        if sol.alpha.min() < 1e-9:
            keep = sol.alpha > 1e-9
            names = [n for n, k in zip(p.action_names, keep) if k]
            p = validate_problem(p.states, p.prior, [(n, p.action_payoffs(n)) for n in names])
            sol = solve(p, chi2_cost(p.prior, 1.0), SolveOptions(backend="best_response"))
        c, cp = salience_adjusted_perturbation(t, sol.alpha)
        rows = apu_solve(p.payoffs, c, cp)
        np.testing.assert_allclose(rows, sol.rule.rows, atol=1e-6)
