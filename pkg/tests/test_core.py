import numpy as np
import pytest

from infoacq.catalog import exchangeable_problem, guess_the_state, random_kernel, random_problem
from infoacq.core import (
    ChoiceRule,
    Kernel,
    Simplex,
    ValidationError,
    apply_garbling,
    detect_symmetries,
    normalize_binary,
    unconditional_distribution,
    validate_problem,
)


class TestValidation:
    def test_well_formed_problem_accepted(self):
        p = validate_problem(["s0", "s1"], [0.5, 0.5], [("a", [1, 0]), ("b", [0, 1])])
        assert p.n_states == 2 and p.n_actions == 2
        assert p.payoffs.shape == (2, 2)

    def test_boundary_prior_rejected(self):
        with pytest.raises(ValidationError, match="full support"):
            validate_problem(["s0", "s1"], [1.0, 0.0], [("a", [1, 0])])

    def test_ragged_payoffs_rejected(self):
        with pytest.raises(ValidationError, match="shape mismatch"):
            validate_problem(["s0", "s1"], [0.5, 0.5], [("a", [1, 0, 2])])

    def test_empty_sets_rejected(self):
        with pytest.raises(ValidationError):
            validate_problem([], [], [("a", [])])
        with pytest.raises(ValidationError):
            validate_problem(["s0"], [1.0], [])

    def test_simplex_sum_tolerance(self):
        Simplex.build(["x", "y"], [0.5 + 4e-13, 0.5 - 4e-13])
        with pytest.raises(ValidationError):
            Simplex.build(["x", "y"], [0.6, 0.5])

    def test_small_negative_entries_clipped(self):
        s = Simplex.build(["x", "y"], [1.0 + 1e-15, -1e-15])
        assert s.weights[1] == 0.0
        assert s.weights.sum() == pytest.approx(1.0, abs=1e-15)


class TestUnconditional:
    def test_deterministic_rule_on_equiprobable_states(self):
        p = validate_problem(["s0", "s1"], [0.5, 0.5], [("a", [1, 0]), ("b", [0, 1])])
        rule = ChoiceRule.build(p, [[1, 0], [0, 1]])
        out = unconditional_distribution(rule, p.prior)
        np.testing.assert_allclose(out.weights, [0.5, 0.5])

    def test_constant_rule_ignores_prior(self):
        p = validate_problem(["s0", "s1"], [0.3, 0.7], [("a", [1, 0]), ("b", [0, 1])])
        rule = ChoiceRule.build(p, [[0.5, 0.5], [0.5, 0.5]])
        out = unconditional_distribution(rule, p.prior)
        np.testing.assert_allclose(out.weights, [0.5, 0.5])

    def test_deterministic_rule_returns_prior_mass(self):
        p = validate_problem(["s0", "s1"], [0.25, 0.75], [("a", [1, 0]), ("b", [0, 1])])
        rule = ChoiceRule.build(p, [[1, 0], [0, 1]])
        out = unconditional_distribution(rule, p.prior)
        np.testing.assert_allclose(out.weights, [0.25, 0.75])

    def test_mixing_rules_mixes_unconditionals(self):
        rng = np.random.default_rng(3)
        p = random_problem(rng, 3, 4)
        r1 = rng.dirichlet(np.ones(4), size=3)
        r2 = rng.dirichlet(np.ones(4), size=3)
        for t in (0.0, 0.25, 0.8, 1.0):
            mixed = ChoiceRule.build(p, t * r1 + (1 - t) * r2)
            lhs = unconditional_distribution(mixed, p.prior).weights
            rhs = t * (p.prior @ r1) + (1 - t) * (p.prior @ r2)
            np.testing.assert_allclose(lhs, rhs, atol=1e-14)

    def test_index_mismatch(self):
        p = validate_problem(["s0", "s1"], [0.5, 0.5], [("a", [1, 0]), ("b", [0, 1])])
        rule = ChoiceRule.build(p, [[1, 0], [0, 1]])
        with pytest.raises(ValidationError, match="index mismatch"):
            unconditional_distribution(rule, [0.2, 0.3, 0.5])


class TestGarbling:
    def test_identity_kernel_is_neutral(self):
        rng = np.random.default_rng(0)
        p = random_kernel(rng, 3, 4)
        ident = Kernel.build(p.target, p.target, np.eye(4))
        out = apply_garbling(ident, p)
        np.testing.assert_allclose(out.rows, p.rows)

    def test_total_garbling_collapses_rows(self):
        rng = np.random.default_rng(1)
        p = random_kernel(rng, 3, 4)
        collapse = Kernel.build(p.target, ["z"], np.ones((4, 1)))
        out = apply_garbling(collapse, p)
        np.testing.assert_allclose(out.rows, np.ones((3, 1)))

    def test_uniform_kernel_matches_matrix_product(self):
        rng = np.random.default_rng(2)
        p = random_kernel(rng, 2, 2)
        k = Kernel.build(p.target, ["z0", "z1"], [[0.5, 0.5], [0.5, 0.5]])
        out = apply_garbling(k, p)
        np.testing.assert_allclose(out.rows, p.rows @ k.rows, atol=1e-15)
        np.testing.assert_allclose(out.rows.sum(axis=1), 1.0, atol=1e-12)

    def test_row_stochasticity_preserved(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            p = random_kernel(rng, 4, 5)
            k = random_kernel(rng, 5, 3)
            k = Kernel.build(p.target, k.target, k.rows)
            out = apply_garbling(k, p)
            np.testing.assert_allclose(out.rows.sum(axis=1), 1.0, atol=1e-12)

    def test_label_mismatch(self):
        rng = np.random.default_rng(5)
        p = random_kernel(rng, 2, 3)
        k = random_kernel(rng, 2, 2)
        with pytest.raises(ValidationError, match="label mismatch"):
            apply_garbling(k, p)


class TestSymmetries:
    def test_guess_the_state_has_full_symmetric_group(self):
        p = guess_the_state(3, 1.0)
        group = detect_symmetries(p)
        assert len(group) == 6

    def test_asymmetric_payoffs_identity_only(self):
        p = validate_problem(
            ["s0", "s1", "s2"],
            [1 / 3, 1 / 3, 1 / 3],
            [("a", [1.0, 0.2, -0.3]), ("b", [0.0, 0.9, 0.4])],
        )
        group = detect_symmetries(p)
        assert group == [(tuple(range(3)), (0, 1))]

    def test_exchangeable_product_space_finds_coordinate_swap(self):
        p = exchangeable_problem([0.3, 0.9], 2)
        group = detect_symmetries(p)
        # identity plus the swap of the two mixed states
        assert len(group) == 2
        perms = {g for g, _ in group}
        assert tuple(range(4)) in perms
        swap = next(g for g, _ in group if g != tuple(range(4)))
        labels = p.states
        mapped = [labels[i] for i in swap]
        assert mapped[0] == labels[0] and mapped[3] == labels[3]
        assert mapped[1] == labels[2] and mapped[2] == labels[1]

    def test_group_axioms_hold(self):
        for p in (guess_the_state(3, 1.0), guess_the_state(4, 2.0), exchangeable_problem([0.0, 1.0], 2)):
            group = detect_symmetries(p)
            perms = {g for g, _ in group}
            n = p.n_states
            for g in perms:
                inv = tuple(np.argsort(g))
                assert inv in perms
                for h in perms:
                    comp = tuple(g[h[i]] for i in range(n))
                    assert comp in perms

    def test_symmetry_respects_action_permutations(self):
        p = guess_the_state(3, 2.0)
        for g, sigma in detect_symmetries(p):
            permuted = p.payoffs[:, list(g)]
            np.testing.assert_allclose(p.payoffs[list(sigma)], permuted, atol=1e-9)


class TestNormalizeBinary:
    def test_componentwise_subtraction(self):
        p = validate_problem(["s0", "s1"], [0.5, 0.5], [("a", [3, 1]), ("b", [2, 2])])
        out = normalize_binary(p)
        np.testing.assert_allclose(out.payoffs[0], [1, -1])
        np.testing.assert_allclose(out.payoffs[1], [0, 0])

    def test_idempotent_on_normalized_input(self):
        p = validate_problem(["s0", "s1"], [0.5, 0.5], [("a", [1, -1]), ("b", [0, 0])])
        out = normalize_binary(p)
        np.testing.assert_allclose(out.payoffs, p.payoffs)

    def test_not_binary(self):
        p = guess_the_state(3, 1.0)
        with pytest.raises(ValidationError, match="binary"):
            normalize_binary(p)
