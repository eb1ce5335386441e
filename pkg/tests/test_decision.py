import json

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from reconstructability.decision import (
    DecisionProblem,
    expected_utility,
    maximizing_actions,
    problem_from_json,
    problem_to_json,
    random_decision_problem,
    same_region,
    superior,
)
from reconstructability.prob import Distribution, Scheme, dumps, random_distribution


@pytest.fixture
def two_by_two():
    s = Scheme.binary(2)
    return DecisionProblem(s, ("a", "b", "c"), [[1, 0, 0, 0], [0, 0, 0, 1], [0.5] * 4])


class TestExpectedUtility:
    def test_point_mass(self, two_by_two):
        s = two_by_two.scheme
        assert expected_utility(two_by_two, "a", Distribution.point_mass(s, 0)) == 1.0
        assert maximizing_actions(two_by_two, Distribution.point_mass(s, 3)) == {"b"}

    def test_uniform_prefers_sure_thing(self, two_by_two):
        u = Distribution.uniform(two_by_two.scheme)
        assert maximizing_actions(two_by_two, u) == {"c"}

    def test_ties_keep_all(self, two_by_two):
        p = Distribution(two_by_two.scheme, [0.5, 0, 0, 0.5])
        assert maximizing_actions(two_by_two, p) == {"a", "b", "c"}

    def test_unknown_action(self, two_by_two):
        with pytest.raises(KeyError):
            expected_utility(two_by_two, "z", Distribution.uniform(two_by_two.scheme))

    def test_shape_checked(self):
        with pytest.raises(ValueError):
            DecisionProblem(Scheme.binary(2), ("a",), [[1, 2, 3]])

    def test_duplicate_actions(self):
        with pytest.raises(ValueError):
            DecisionProblem(Scheme.binary(1), ("a", "a"), [[1, 2], [3, 4]])


class TestRegions:
    def test_same_region_and_superior(self, two_by_two):
        s = two_by_two.scheme
        truth = Distribution(s, [0.7, 0.1, 0.1, 0.1])
        good = Distribution(s, [0.9, 0.0, 0.0, 0.1])
        bad = Distribution(s, [0.1, 0.1, 0.1, 0.7])
        assert same_region(two_by_two, truth, good)
        assert not same_region(two_by_two, truth, bad)
        assert superior(two_by_two, truth, good, bad)
        assert not superior(two_by_two, truth, bad, good)
        assert not superior(two_by_two, truth, good, good)

    @settings(max_examples=150, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), lam=st.floats(0, 1))
    def test_regions_convex(self, seed, lam):
        rng = np.random.default_rng(seed)
        s = Scheme.binary(3)
        dp = random_decision_problem(s, 4, rng)
        p, q = random_distribution(s, rng), random_distribution(s, rng)
        common = maximizing_actions(dp, p) & maximizing_actions(dp, q)
        mix = Distribution.normalized(s, lam * p.probs + (1 - lam) * q.probs)
        eu = dp.expected_utilities(mix)
        for a in common:
            assert eu[dp.actions.index(a)] >= eu.max() - 1e-12

    @settings(max_examples=150, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), scale=st.floats(0.01, 100), shift=st.floats(-10, 10))
    def test_affine_invariance(self, seed, scale, shift):
        rng = np.random.default_rng(seed)
        s = Scheme.of(3, 2)
        dp = random_decision_problem(s, 5, rng)
        p = random_distribution(s, rng)
        eu = np.sort(dp.expected_utilities(p))
        assume(eu[-1] - eu[-2] > 1e-9)
        moved = DecisionProblem(s, dp.actions, scale * dp.utilities + shift)
        assert maximizing_actions(moved, p) == maximizing_actions(dp, p)

    def test_regions_cover_simplex(self, rng):
        s = Scheme.binary(3)
        dp = random_decision_problem(s, 10, rng)
        for _ in range(200):
            assert maximizing_actions(dp, random_distribution(s, rng))


class TestRandomProblem:
    def test_shape_and_range(self, rng):
        dp = random_decision_problem(Scheme.binary(3), 10, rng)
        assert dp.utilities.shape == (10, 8)
        assert dp.actions[0] == "a1"
        assert 0 <= dp.utilities.min() and dp.utilities.max() < 1


class TestFile:
    def test_round_trip_bytes(self, rng):
        s = Scheme.binary(3)
        text = dumps(problem_to_json(random_decision_problem(s, 4, rng)))
        again = dumps(problem_to_json(problem_from_json(s, json.loads(text))))
        assert text == again

    def test_wrong_width(self):
        with pytest.raises(ValueError):
            problem_from_json(Scheme.binary(2), {"actions": ["a"], "utilities": [[1, 2]]})
