import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lmomcts import (
    CountingProblem,
    Population,
    Problem,
    RandomStream,
    clamp,
    dominates,
    make_problem,
    random_population,
)

obj_vectors = st.lists(st.floats(-10, 10, allow_nan=False), min_size=2, max_size=4)


class TestDominates:
    def test_strict_improvement(self):
        assert dominates((1, 1), (2, 2))

    def test_incomparable_pair(self):
        assert not dominates((1, 2), (2, 1))
        assert not dominates((2, 1), (1, 2))

    def test_irreflexive(self):
        assert not dominates((1, 1), (1, 1))

    def test_partial_improvement(self):
        assert dominates((1, 2), (1, 3))

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            dominates((1, 2), (1, 2, 3))

    @given(obj_vectors)
    def test_irreflexive_property(self, a):
        assert not dominates(a, a)

    @given(st.integers(2, 4).flatmap(
        lambda m: st.tuples(*(st.lists(st.floats(-5, 5, allow_nan=False), min_size=m, max_size=m)
                              for _ in range(2)))))
    def test_asymmetric(self, pair):
        a, b = pair
        if dominates(a, b):
            assert not dominates(b, a)

    @given(st.integers(2, 3).flatmap(
        lambda m: st.tuples(*(st.lists(st.floats(-5, 5, allow_nan=False), min_size=m, max_size=m)
                              for _ in range(3)))))
    def test_transitive(self, triple):
        a, b, c = triple
        if dominates(a, b) and dominates(b, c):
            assert dominates(a, c)


def _unit_box_problem(d: int):
    from lmomcts import Problem

    return Problem(name="unit", d=d, m=2,
                   lower=np.zeros(d), upper=np.ones(d),
                   evaluate_batch=lambda x: np.stack([x.sum(1), -x.sum(1)], axis=1))


class TestClamp:
    def setup_method(self):
        self.problem = make_problem("BI_SPHERE", 2, 3)

    def test_projection(self):
        out = clamp(np.array([-0.5, 0.5, 1.5]), _unit_box_problem(3))
        assert np.array_equal(out, [0.0, 0.5, 1.0])

    def test_boundary_value_unchanged(self):
        assert clamp(np.array([1.0]), _unit_box_problem(1))[0] == 1.0

    def test_identity_inside(self):
        x = np.array([0.0, 0.5, 1.0])
        assert np.array_equal(clamp(x, self.problem), x)

    def test_boundary_fixed_point(self):
        x = np.array([2.0, -1.0, 2.0])
        assert np.array_equal(clamp(x, self.problem), x)

    @given(st.lists(st.floats(-100, 100, allow_nan=False), min_size=3, max_size=3))
    def test_exact_bounds(self, values):
        out = clamp(np.array(values), self.problem)
        assert np.all(out >= self.problem.lower)
        assert np.all(out <= self.problem.upper)


class TestRandomPopulation:
    def test_in_bounds_and_evaluated(self):
        problem = make_problem("LSMOP1", 3, 100)
        pop = random_population(problem, 300, RandomStream(1))
        assert len(pop) == 300
        assert np.all(pop.x >= problem.lower) and np.all(pop.x <= problem.upper)
        assert pop.objectives.shape == (300, 3)
        assert np.all(np.isfinite(pop.objectives))

    def test_same_seed_identical(self):
        problem = make_problem("LSMOP2", 3, 50)
        a = random_population(problem, 20, RandomStream(9))
        b = random_population(problem, 20, RandomStream(9))
        assert np.array_equal(a.x, b.x)
        assert np.array_equal(a.objectives, b.objectives)

    def test_component_mean_near_midpoint(self):
        # law of large numbers: 1e5 draws per component within 1% of the midpoint
        problem = make_problem("BI_SPHERE", 2, 2)
        pop = random_population(problem, 100_000, RandomStream(3))
        mid = (problem.lower + problem.upper) / 2
        span = problem.upper - problem.lower
        assert np.all(np.abs(pop.x.mean(axis=0) - mid) < 0.01 * span)

    def test_too_small(self):
        with pytest.raises(ValueError):
            random_population(make_problem("BI_SPHERE", 2, 2), 1, RandomStream(0))


class TestRandomStream:
    def test_reproducible(self):
        a = RandomStream(123).generator.uniform(size=10)
        b = RandomStream(123).generator.uniform(size=10)
        assert np.array_equal(a, b)

    def test_split_independent_of_parent_draws(self):
        parent_a = RandomStream(5)
        child_a = parent_a.split(1)[0]
        parent_b = RandomStream(5)
        parent_b.generator.uniform(size=1000)  # consume parent state first
        child_b = parent_b.split(1)[0]
        assert np.array_equal(child_a.generator.uniform(size=8),
                              child_b.generator.uniform(size=8))

    def test_split_children_distinct(self):
        kids = RandomStream(5).split(3)
        draws = [k.generator.uniform(size=4) for k in kids]
        assert not np.array_equal(draws[0], draws[1])
        assert not np.array_equal(draws[1], draws[2])


class TestCountingProblem:
    def test_counts_every_evaluation(self):
        counting = CountingProblem(make_problem("BI_SPHERE", 2, 2))
        counting.evaluate_batch(np.zeros((7, 2)))
        counting.evaluate(np.zeros(2))
        assert counting.count == 8


class TestPopulation:
    def test_members_roundtrip(self):
        pop = Population(np.arange(6.0).reshape(3, 2), np.arange(6.0).reshape(3, 2))
        members = pop.members
        assert len(members) == 3
        assert members[1].evaluated
        assert np.array_equal(members[2].x, [4.0, 5.0])

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            Population(np.zeros((3, 2)), np.zeros((2, 2)))
