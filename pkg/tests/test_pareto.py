import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from binmf.errors import ConfigError, DomainError
from binmf.kernels import KernelSpec
from binmf.objectives import ObjectiveVector
from binmf.pareto import (DEFAULT_ALPHAS, SweepConfig, SweepError, boundary_report,
                          conflicting_interval, dominates, filter_nondominated, front_export,
                          nondominated_mask, sweep)
from binmf.solver import SolveConfig

BASE = SolveConfig(rank=2, alpha=0.0, kernel=KernelSpec.gaussian(1.0), max_iter=30)


@pytest.mark.parametrize("u, v, expected", [
    ((1.0, 2.0), (2.0, 3.0), True),
    ((1.0, 3.0), (2.0, 2.0), False),
    ((1.0, 2.0), (1.0, 2.0), False),
    ((1.0, 2.0), (1.0, 2.5), True),
    ((2.0, 3.0), (1.0, 2.0), False),
])
def test_dominates_examples(u, v, expected):
    assert dominates(u, v) is expected


def test_dominates_accepts_objective_vectors():
    a = ObjectiveVector(1.0, 2.0, 0.5, 1.5)
    b = ObjectiveVector(1.0, 3.0, 0.5, 2.0)
    assert dominates(a, b) and not dominates(b, a)


def test_eps_dominance_is_stricter():
    assert dominates((1.0, 2.0), (1.05, 2.0))
    assert not dominates((1.0, 2.0), (1.05, 2.0), eps=0.1)
    assert dominates((1.0, 2.0), (1.5, 2.05), eps=0.1)


def test_filter_example():
    pts = [(1, 5), (2, 3), (3, 4), (4, 1), (2, 3)]
    front = filter_nondominated(pts)
    assert front.nondominated == (0, 1, 3, 4)
    assert front.dominated == (2,)
    assert front.is_dominated(2) and not front.is_dominated(4)


def test_filter_empty():
    with pytest.raises(DomainError):
        filter_nondominated([])


def test_filter_matches_brute_force():
    rng = np.random.default_rng(0)
    for _ in range(200):
        n = int(rng.integers(1, 51))
        # coarse grid values force plenty of ties in one or both coordinates
        pts = rng.integers(0, 8, (n, 2)).astype(float) / 4
        if rng.random() < 0.5:
            pts = rng.uniform(0, 1, (n, 2))
        pts = [tuple(p) for p in pts]
        expected = oracles.brute_dominated(pts)
        assert [not m for m in nondominated_mask(pts)] == expected


@settings(max_examples=200)
@given(st.lists(st.tuples(st.floats(0, 10), st.floats(0, 10)), min_size=1, max_size=50))
def test_filter_matches_brute_force_property(pts):
    assert [not m for m in nondominated_mask(pts)] == oracles.brute_dominated(pts)


@settings(max_examples=100)
@given(st.lists(st.tuples(st.floats(0, 10), st.floats(0, 10)), min_size=1, max_size=30))
def test_eps_zero_path_agrees_with_pairwise(pts):
    pairwise = [not any(dominates(q, p) for j, q in enumerate(pts) if j != i)
                for i, p in enumerate(pts)]
    assert list(nondominated_mask(pts)) == pairwise


@settings(max_examples=200)
@given(*(st.tuples(st.integers(0, 4), st.integers(0, 4)) for _ in range(3)))
def test_dominance_order_properties(u, v, w):
    assert not dominates(u, u)
    assert not (dominates(u, v) and dominates(v, u))
    if dominates(u, v) and dominates(v, w):
        assert dominates(u, w)


class TestSweepConfig:
    def test_default_grid(self):
        assert len(DEFAULT_ALPHAS) == 51
        assert DEFAULT_ALPHAS[0] == 0.0 and DEFAULT_ALPHAS[-1] == 1.0
        assert DEFAULT_ALPHAS[1] == 0.02

    @pytest.mark.parametrize("alphas", [(), (0.5, 0.5), (0.6, 0.4), (-0.1, 0.5), (0.5, 1.1)])
    def test_invalid_grid(self, alphas):
        with pytest.raises(ConfigError):
            SweepConfig(BASE, alphas)

    def test_seed_count(self):
        with pytest.raises(ConfigError):
            SweepConfig(BASE, (0.0, 1.0), seeds=(1,))

    def test_configs(self):
        sc = SweepConfig(BASE, (0.0, 0.5), seeds=(3, 4))
        assert [(c.alpha, c.seed) for c in sc.configs()] == [(0.0, 3), (0.5, 4)]
        assert [c.seed for c in SweepConfig(BASE, (0.0, 0.5)).configs()] == [0, 0]

    def test_round_trip(self):
        sc = SweepConfig(BASE, (0.0, 0.25, 1.0), seeds=(1, 2, 3))
        assert SweepConfig.from_dict(sc.to_dict()) == sc


@pytest.fixture(scope="module")
def small_front():
    X = np.random.default_rng(1).uniform(0, 1, (4, 12))
    return X, sweep(X, SweepConfig(BASE, (0.0, 0.25, 0.5, 0.75, 1.0)))


class TestSweep:
    def test_one_solution_per_alpha(self, small_front):
        _, front = small_front
        assert [s.alpha for s in front.solutions] == [0.0, 0.25, 0.5, 0.75, 1.0]
        assert sorted(front.nondominated + front.dominated) == list(range(5))

    def test_single_alpha(self):
        X = np.random.default_rng(2).uniform(0, 1, (3, 5))
        front = sweep(X, SweepConfig(BASE, (0.3,)))
        assert front.nondominated == (0,)

    def test_jobs_do_not_change_result(self, small_front):
        X, front = small_front
        other = sweep(X, SweepConfig(BASE, (0.0, 0.25, 0.5, 0.75, 1.0)), jobs=2)
        assert front_export(other) == front_export(front)
        for s, t in zip(front.solutions, other.solutions):
            assert s.e == t.e and s.a == t.a

    def test_failure_names_alpha(self):
        # a non-positive-definite sigmoid kernel fails inside the sub-problem
        from binmf.updates import UpdateRule
        base = SolveConfig(rank=1, alpha=0.0, kernel=KernelSpec.sigmoid(1.0, -3.0),
                           rule=UpdateRule("additive"), max_iter=2)
        X = np.full((2, 1), 3.0)
        with pytest.raises(SweepError) as info:
            sweep(X, SweepConfig(base, (0.0, 0.5)))
        assert info.value.alpha == 0.0


def test_front_export(small_front):
    _, front = small_front
    rows = front_export(front)
    assert [r["alpha"] for r in rows] == [0.0, 0.25, 0.5, 0.75, 1.0]
    for r, s in zip(rows, front.solutions):
        assert r["j_input"] == s.objective.j_input
        assert r["j_aggregated"] == s.objective.j_aggregated
        assert r["iterations"] == s.iterations_run
    assert sum(r["dominated"] for r in rows) == len(front.dominated)


def test_boundary_report(small_front):
    _, front = small_front
    rep = boundary_report(front)
    assert set(rep) == {"alpha_0_dominated", "alpha_1_dominated", "linear_end_has_min_j_input"}


def test_conflicting_interval():
    from binmf.pareto import ParetoFront
    from binmf.solver import SolutionRecord
    from binmf.matrix import NonNegMatrix

    def rec(alpha, jx, jh):
        ob = ObjectiveVector(jx, jh, alpha, alpha * jx + (1 - alpha) * jh)
        m = NonNegMatrix([[1.0]])
        return SolutionRecord(m, m, ob, 1, (0.0,), "max_iter", 0)

    sols = (rec(0.0, 5, 1), rec(0.5, 3, 2), rec(1.0, 1, 4))
    assert conflicting_interval(ParetoFront(sols, (0, 1, 2), ())) == (0.0, 1.0)
    flat = (rec(0.0, 1, 1), rec(1.0, 1, 1))
    assert conflicting_interval(ParetoFront(flat, (0, 1), ())) is None
