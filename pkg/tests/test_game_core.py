from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from replicator_lab.game_core import (
    MixedStrategy,
    PayoffMatrix,
    PopulationState,
    Strategy,
    average_payoff,
    compare,
    mixed_payoff,
    payoff_advantage,
    payoff_pure,
    payoff_vs_population,
    reduced_field_coefficients,
    reduced_field_derivative,
    replicator_field_2d,
    replicator_field_reduced,
)

from conftest import matrices, payoff, unit

M = PayoffMatrix(1, 3, 2, 1)
HALF = PopulationState(0.5, 0.5)


def expected_vs_population(m, s, x):
    # expectation over an opponent drawn with probabilities x
    return sum(x.share(o) * payoff_pure(m, s, o) for o in Strategy)


def double_sum_average(m, x):
    return sum(x.share(s) * x.share(o) * payoff_pure(m, s, o) for s in Strategy for o in Strategy)


class TestTypes:
    def test_strategy_has_two_variants(self):
        assert [s.value for s in Strategy] == ["T", "Th"]

    @pytest.mark.parametrize("bad", [float("nan"), float("inf"), -float("inf")])
    def test_payoffs_must_be_finite(self, bad):
        with pytest.raises(ValueError):
            PayoffMatrix(1, bad, 0, 0)

    def test_payoffs_reject_non_numbers(self):
        with pytest.raises(TypeError):
            PayoffMatrix(1, "2", 0, 0)
        with pytest.raises(TypeError):
            PayoffMatrix(True, 0, 0, 0)

    def test_no_ordering_constraint(self):
        PayoffMatrix(-1e6, 3.5, Fraction(1, 3), 0)

    def test_json_roundtrip(self):
        doc = {"alpha": 1, "beta": 3.5, "gamma": -2, "delta": 0.25}
        assert PayoffMatrix.from_json(doc).to_json() == doc

    def test_json_rejects_missing_and_extra(self):
        with pytest.raises(ValueError, match="missing"):
            PayoffMatrix.from_json({"alpha": 1})
        with pytest.raises(ValueError, match="unknown"):
            PayoffMatrix.from_json({"alpha": 1, "beta": 1, "gamma": 1, "delta": 1, "eta": 0})

    def test_population_renormalizes_small_drift(self):
        x = PopulationState(0.5 + 4e-10, 0.5)
        assert abs(x.x1 + x.x2 - 1) < 1e-12

    def test_population_rejects_large_drift(self):
        with pytest.raises(ValueError):
            PopulationState(0.5, 0.51)
        with pytest.raises(ValueError):
            PopulationState(1.2, -0.2)

    def test_exact_population(self):
        x = PopulationState(Fraction(1, 3), Fraction(2, 3))
        assert x.x1 == Fraction(1, 3)

    def test_mixed_strategy_invariant(self):
        assert MixedStrategy(0.25, 0.75).p_Th == 0.75
        with pytest.raises(ValueError):
            MixedStrategy(0.3, 0.3)


class TestCompare:
    def test_relative_absolute_band(self):
        assert compare(1.0, 1.0 + 5e-10) == 0
        assert compare(1e6, 1e6 + 1e-4) == 0
        assert compare(1e6, 1e6 + 1e-2) == -1
        assert compare(2.0, 1.0) == 1

    def test_exact_mode(self):
        assert compare(Fraction(1, 3), Fraction(1, 3), eps=0) == 0
        assert compare(1.0, 1.0 + 1e-15, eps=0) == -1


class TestPayoffs:
    def test_pure_cells(self):
        assert payoff_pure(M, Strategy.T, Strategy.T) == 1
        assert payoff_pure(M, Strategy.T, Strategy.Th) == 3
        assert payoff_pure(M, Strategy.Th, Strategy.T) == 2
        assert payoff_pure(M, Strategy.Th, Strategy.Th) == 1

    def test_zero_matrix(self):
        z = PayoffMatrix(0, 0, 0, 0)
        assert all(payoff_pure(z, s, o) == 0 for s in Strategy for o in Strategy)

    def test_vs_population_values(self):
        assert expected_vs_population(M, Strategy.T, HALF) == 2.0
        assert expected_vs_population(M, Strategy.Th, HALF) == 1.5
        assert payoff_vs_population(M, Strategy.T, HALF) == 2.0
        assert payoff_vs_population(M, Strategy.Th, HALF) == 1.5

    def test_vs_pure_population(self):
        x = PopulationState(1, 0)
        assert payoff_vs_population(M, Strategy.T, x) == M.alpha
        assert payoff_vs_population(M, Strategy.Th, x) == M.gamma

    def test_average_payoff(self):
        assert double_sum_average(M, HALF) == 1.75
        assert average_payoff(M, HALF) == 1.75
        assert average_payoff(M, PopulationState(1, 0)) == M.alpha

    @given(st.floats(-10, 10), unit)
    def test_constant_game_average(self, c, x1):
        m = PayoffMatrix(c, c, c, c)
        assert average_payoff(m, PopulationState.from_x1(x1)) == pytest.approx(c, abs=1e-12)

    @given(matrices, unit)
    def test_vs_population_matches_expectation(self, m, x1):
        x = PopulationState.from_x1(x1)
        for s in Strategy:
            assert payoff_vs_population(m, s, x) == pytest.approx(
                expected_vs_population(m, s, x), abs=1e-12)
        assert average_payoff(m, x) == pytest.approx(double_sum_average(m, x), abs=1e-12)

    def test_mixed_payoff_four_terms(self):
        sigma = MixedStrategy(0.5, 0.5)
        assert 0.25 * (1 + 3 + 2 + 1) == 1.75
        assert mixed_payoff(M, sigma, HALF) == 1.75

    @given(matrices, unit)
    def test_mixed_payoff_reductions(self, m, x1):
        x = PopulationState.from_x1(x1)
        assert mixed_payoff(m, MixedStrategy(1, 0), x) == pytest.approx(
            payoff_vs_population(m, Strategy.T, x), abs=1e-12)
        assert mixed_payoff(m, MixedStrategy.from_state(x), x) == pytest.approx(
            average_payoff(m, x), abs=1e-12)


class TestFields:
    def test_field_2d_value(self):
        assert 0.5 * (2.0 - 1.75) == 0.125
        assert replicator_field_2d(M, HALF) == (0.125, -0.125)
        assert replicator_field_reduced(M, 0.5) == pytest.approx(0.125, abs=1e-15)

    def test_boundary_zero(self):
        assert replicator_field_2d(M, PopulationState(1, 0)) == (0, 0)
        assert replicator_field_2d(M, PopulationState(0, 1)) == (0, 0)

    def test_reduced_value(self):
        m = PayoffMatrix(0, 2, 1, 1)
        assert replicator_field_2d(m, PopulationState(0.25, 0.75))[0] == 0.09375
        assert replicator_field_reduced(m, 0.25) == 0.09375

    def test_reduced_root_at_two_thirds(self):
        from scipy.optimize import brentq

        root = brentq(lambda x: replicator_field_reduced(M, x), 0.3, 0.9, xtol=1e-15)
        assert root == pytest.approx(2 / 3, abs=1e-12)
        assert replicator_field_reduced(M, Fraction(2, 3)) == 0

    @settings(max_examples=300)
    @given(matrices, unit)
    def test_simplex_tangency(self, m, x1):
        v1, v2 = replicator_field_2d(m, PopulationState.from_x1(x1))
        assert abs(v1 + v2) < 1e-12

    @settings(max_examples=300)
    @given(matrices, unit)
    def test_factored_form(self, m, x1):
        assert abs(replicator_field_reduced(m, x1)
                   - x1 * (1 - x1) * payoff_advantage(m, x1)) < 1e-12

    @settings(max_examples=300)
    @given(matrices, unit, st.floats(-100, 100))
    def test_shift_invariance(self, m, x1, c):
        x = PopulationState.from_x1(x1)
        a = replicator_field_2d(m, x)
        b = replicator_field_2d(m.shifted(c), x)
        assert abs(a[0] - b[0]) < 1e-12 and abs(a[1] - b[1]) < 1e-12

    @given(matrices)
    def test_boundaries_are_exact_roots(self, m):
        assert replicator_field_reduced(m, 0) == 0
        assert replicator_field_reduced(m, 1) == 0

    def test_reduction_consistency_bulk(self, rng):
        for _ in range(10_000):
            m = PayoffMatrix(*rng.uniform(-5, 5, 4).tolist())
            x1 = rng.uniform()
            first = replicator_field_2d(m, PopulationState(x1, 1 - x1))[0]
            assert abs(replicator_field_reduced(m, x1) - first) < 1e-12

    @given(matrices, st.floats(-3, 3))
    def test_mirror_evaluation(self, m, x1):
        # f(-x1) equals the cubic with x1 -> -x1 substituted termwise
        c0, c1, c2, c3 = reduced_field_coefficients(m)
        mirrored = c0 - c1 * x1 + c2 * x1 ** 2 - c3 * x1 ** 3
        assert replicator_field_reduced(m, -x1) == pytest.approx(mirrored, abs=1e-9)

    def test_mirror_is_not_a_symmetry_in_general(self):
        assert replicator_field_reduced(M, -0.5) != pytest.approx(replicator_field_reduced(M, 0.5))
        assert replicator_field_reduced(M, -0.5) != pytest.approx(-replicator_field_reduced(M, 0.5))

    @given(matrices, st.floats(-2, 2))
    def test_coefficients_match_polynomial(self, m, x1):
        c0, c1, c2, c3 = reduced_field_coefficients(m)
        assert replicator_field_reduced(m, x1) == pytest.approx(
            c0 + c1 * x1 + c2 * x1 ** 2 + c3 * x1 ** 3, abs=1e-9)

    @given(matrices, unit)
    def test_derivative_against_difference(self, m, x1):
        h = 1e-6
        fd = (replicator_field_reduced(m, x1 + h) - replicator_field_reduced(m, x1 - h)) / (2 * h)
        assert reduced_field_derivative(m, x1) == pytest.approx(fd, abs=1e-6)

    def test_vectorized_evaluation(self):
        xs = np.linspace(0, 1, 5)
        assert replicator_field_reduced(M, xs).shape == (5,)
