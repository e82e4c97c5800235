import itertools
import math

import numpy as np
import pytest
from core import problem
from core.errors import DimensionMismatch, InfeasibleConstraint, InvalidMatrix, LengthMismatch, TooLarge
from core.problem import DiagonalTerms, ProblemFile, build_instance, index_to_bitstring
from pydantic import ValidationError


def bits_of(n: int):
    return [list(x) for x in itertools.product([0, 1], repeat=n)]


class TestBitstrings:
    @pytest.mark.parametrize(
        "index, n, bits", [(0, 3, "000"), (1, 3, "100"), (6, 3, "011"), (5, 4, "1010")]
    )
    def test_qubit_zero_prints_first(self, index, n, bits):
        assert index_to_bitstring(index, n) == bits
        assert problem.bitstring_to_index(bits) == index


class TestBuildInstance:
    def test_valid_instance(self):
        instance = build_instance([1.0, 2.0, 3.0], np.zeros((3, 3)), 0.075, 2)
        assert instance.n == 3
        assert instance.gamma == pytest.approx(6.0)

    def test_m_equal_to_n(self):
        with pytest.raises(InfeasibleConstraint):
            build_instance([1.0, 2.0, 3.0], np.zeros((3, 3)), 0.075, 3)

    @pytest.mark.parametrize("m", [0, -1])
    def test_non_positive_m(self, m):
        with pytest.raises(InfeasibleConstraint):
            build_instance([1.0, 2.0], np.zeros((2, 2)), 0.075, m)

    def test_asymmetric_beta(self):
        with pytest.raises(DimensionMismatch):
            build_instance([1.0, 2.0], [[0.0, 0.5], [0.1, 0.0]], 0.075, 1)

    def test_nonzero_diagonal(self):
        with pytest.raises(InvalidMatrix):
            build_instance([1.0, 2.0], [[1.0, 0.5], [0.5, 0.0]], 0.075, 1)

    def test_shape_mismatch(self):
        with pytest.raises(DimensionMismatch):
            build_instance([1.0, 2.0, 3.0], np.zeros((2, 2)), 0.075, 1)

    def test_explicit_gamma_is_kept(self):
        instance = build_instance([1.0, 2.0], np.zeros((2, 2)), 0.075, 1, gamma=10.0)
        assert instance.gamma == 10.0


class TestGammaRule:
    def test_hand_derived_value(self):
        instance = build_instance([1.0, 2.0], [[0.0, 0.5], [0.5, 0.0]], 0.075, 1)
        assert problem.gamma_rule(instance) == pytest.approx(3.075, abs=1e-12)

    def test_zero_similarity(self):
        instance = build_instance([1.0, 2.0, 4.0], np.zeros((3, 3)), 0.075, 1)
        assert problem.gamma_rule(instance) == pytest.approx(7.0)

    def test_all_zero(self):
        instance = build_instance(np.zeros(3), np.zeros((3, 3)), 0.075, 1)
        assert problem.gamma_rule(instance) == 0.0


class TestObjectives:
    def test_all_zeros(self, small_instance):
        assert problem.objective_raw(small_instance, [0] * 5) == 0.0

    def test_hand_derived_value(self):
        instance = build_instance([1.0, 2.0], [[0.0, 0.5], [0.5, 0.0]], 1.0, 1)
        assert problem.objective_raw(instance, [1, 1]) == pytest.approx(2.0, abs=1e-12)

    def test_single_bit(self, small_instance):
        for i in range(5):
            x = [0] * 5
            x[i] = 1
            assert problem.objective_raw(small_instance, x) == pytest.approx(small_instance.mu[i])

    def test_length_mismatch(self, small_instance):
        with pytest.raises(LengthMismatch):
            problem.objective_raw(small_instance, [1, 0])

    def test_penalty_vanishes_in_constraint(self, small_instance):
        for x in bits_of(5):
            if sum(x) == 2:
                assert problem.objective_penalized(small_instance, x) == pytest.approx(
                    problem.objective_raw(small_instance, x), abs=1e-12
                )

    @pytest.mark.parametrize("gamma, x, expected", [(1.0, [0, 0], -1.0), (2.0, [1, 1], -2.0)])
    def test_pure_penalty(self, gamma, x, expected):
        instance = build_instance(np.zeros(2), np.zeros((2, 2)), 0.075, 1, gamma=gamma)
        assert problem.objective_penalized(instance, x) == expected

    @pytest.mark.parametrize("seed", range(5))
    def test_relabeling_sentences_keeps_objective(self, make_instance, seed):
        instance = make_instance(7, 3, seed=seed)
        rng = np.random.default_rng(seed)
        perm = rng.permutation(7)
        relabeled = build_instance(instance.mu[perm], instance.beta[np.ix_(perm, perm)], instance.lam, 3)
        for _ in range(10):
            x = rng.integers(0, 2, size=7)
            assert problem.objective_raw(relabeled, x[perm]) == pytest.approx(
                problem.objective_raw(instance, x), abs=1e-12
            )


class TestPenalizedCoefficients:
    def test_zero_gamma(self, make_instance):
        base = make_instance(4, 2, seed=1)
        instance = build_instance(base.mu, base.beta, base.lam, 2, gamma=0.0)
        coeffs = problem.penalized_coefficients(instance)
        np.testing.assert_allclose(coeffs.linear, instance.mu)
        np.testing.assert_allclose(coeffs.quadratic, instance.lam * instance.beta)

    def test_hand_derived_value(self):
        instance = build_instance(np.zeros(3), np.zeros((3, 3)), 0.075, 2, gamma=1.0)
        coeffs = problem.penalized_coefficients(instance)
        np.testing.assert_allclose(coeffs.linear, [3.0, 3.0, 3.0])
        np.testing.assert_allclose(coeffs.quadratic, 1.0 - np.eye(3))

    def test_consistency_with_penalized_objective(self, make_instance):
        instance = make_instance(8, 3, seed=11)
        coeffs = problem.penalized_coefficients(instance)
        rng = np.random.default_rng(0)
        for _ in range(50):
            x = rng.integers(0, 2, size=8).astype(float)
            expanded = coeffs.linear @ x - x @ coeffs.quadratic @ x - instance.gamma * instance.m**2
            assert expanded == pytest.approx(problem.objective_penalized(instance, x), abs=1e-9)


class TestObjectiveTable:
    @pytest.mark.parametrize("kind", ["raw", "penalized"])
    def test_table_matches_direct_evaluation(self, make_instance, kind):
        instance = make_instance(6, 2, seed=5)
        table = problem.objective_table(instance, kind)
        direct = problem.objective_raw if kind == "raw" else problem.objective_penalized
        for index in range(1 << 6):
            bits = [int(b) for b in index_to_bitstring(index, 6)]
            assert table[index] == pytest.approx(direct(instance, bits), abs=1e-9)

    def test_diagonal_terms_evaluate(self):
        terms = DiagonalTerms(linear=np.array([1.0, 2.0]), pairs=np.array([[0.0, 0.5], [0.5, 0.0]]), constant=-1.0)
        assert terms.evaluate([1, 1]) == pytest.approx(3.0)
        assert terms.table[3] == pytest.approx(3.0)


class TestBruteForce:
    def test_hand_derived_oracle(self):
        instance = build_instance([1.0, 2.0, 3.0], np.zeros((3, 3)), 0.5, 2)
        oracle = problem.brute_force(instance)
        assert oracle.f_max == pytest.approx(5.0)
        assert oracle.f_min == pytest.approx(3.0)
        assert oracle.argmax == "011"
        assert oracle.mean_feasible == pytest.approx(4.0)
        assert oracle.feasible_count == 3

    def test_constant_centrality_ties(self):
        instance = build_instance(np.full(5, 2.0), np.zeros((5, 5)), 0.075, 2)
        oracle = problem.brute_force(instance)
        assert oracle.f_min == oracle.f_max == pytest.approx(4.0)
        assert oracle.argmax == "00011"

    def test_feasible_count_n20(self):
        assert math.comb(20, 8) == 125970

    def test_too_large(self, monkeypatch, make_instance):
        monkeypatch.setattr(problem.settings, "BRUTE_FORCE_MAX_QUBITS", 4)
        with pytest.raises(TooLarge):
            problem.brute_force(make_instance(5, 2, seed=0))

    def test_random_baseline(self):
        instance = build_instance([1.0, 2.0, 3.0], np.zeros((3, 3)), 0.075, 2)
        assert problem.random_baseline(instance) == pytest.approx(4.0)
        zero = build_instance(np.zeros(3), np.zeros((3, 3)), 0.075, 2)
        assert problem.random_baseline(zero) == 0.0


class TestGammaSeparation:
    @pytest.mark.parametrize("seed", range(50))
    def test_feasible_dominates_infeasible(self, make_instance, seed):
        rng = np.random.default_rng(1000 + seed)
        n = int(rng.integers(3, 11))
        m = int(rng.integers(1, n))
        instance = make_instance(n, m, seed=seed)
        table = problem.objective_table(instance, "penalized")
        feasible = instance.weights == m
        assert table[feasible].min() >= table[~feasible].max() - 1e-12


class TestProblemFile:
    def test_round_trip_uses_lambda_alias(self, small_instance):
        payload = ProblemFile.from_instance(small_instance).model_dump(by_alias=True)
        assert "lambda" in payload and "lambda_" not in payload
        restored = ProblemFile.model_validate(payload).to_instance()
        assert restored.gamma == pytest.approx(small_instance.gamma)
        np.testing.assert_allclose(restored.beta, small_instance.beta)

    def test_shape_validation(self):
        with pytest.raises(ValidationError):
            ProblemFile.model_validate({"n": 3, "m": 1, "lambda": 0.1, "mu": [1.0], "beta": [[0.0]]})
