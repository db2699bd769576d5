import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from msalloc import (
    ExhaustedError,
    GreedyState,
    InfeasibleError,
    ProblemInstance,
    greedy_step,
    min_objective,
    normalize,
    solve_exact,
)
from msalloc.exact import initial_state

from conftest import instances, naive_optimum


def state(weights, counts=None, caps=None, units=5):
    k = len(weights)
    return GreedyState(
        remaining_units=units,
        live=frozenset(range(k)),
        base_weights=tuple(weights),
        caps=tuple(caps or [10] * k),
        counts=tuple(counts or [0] * k),
    )


class TestGreedyStep:
    def test_trace(self):
        s = greedy_step(state((8, 5)), 0.5)
        assert s.counts == (1, 0)
        assert s.current_weights(0.5) == (4, 5)
        s = greedy_step(s, 0.5)
        assert s.counts == (1, 1)
        assert s.remaining_units == 3

    def test_tie_goes_to_lower_id(self):
        s = greedy_step(state((4, 4)), 0.5)
        assert s.counts == (1, 0)

    def test_removes_class_at_budget(self):
        s = greedy_step(state((8, 5), caps=(1, 3)), 0.5)
        assert s.live == frozenset({1})

    def test_exhausted(self):
        s = GreedyState(2, frozenset(), (1.0,), (0,), (0,))
        with pytest.raises(ExhaustedError):
            greedy_step(s, 0.5)
        with pytest.raises(ExhaustedError):
            greedy_step(state((1,), units=0), 0.5)


class TestSolveExact:
    def test_small_example(self):
        pr = ProblemInstance.build(3, 0.5, (8, 5), (3, 3))
        assert naive_optimum(pr) == (4.5, (2, 1))
        r = solve_exact(pr)
        assert r.counts == (2, 1)
        assert r.min_objective == 4.5
        assert r.weighted_sum == 8.5
        assert r.method == "exact"

    @pytest.mark.parametrize("weights", [(1, 1), (9, 0.2), (0.5, 7)])
    def test_trivial_branch(self, weights):
        r = solve_exact(ProblemInstance.build(5, 0.4, weights, (2, 2)))
        assert r.counts == (2, 2)
        assert any(t.startswith("trivial") for t in r.trace)

    def test_single_class(self):
        assert solve_exact(ProblemInstance.build(7, 0.3, (2.0,), (4.9,))).counts == (4,)
        assert solve_exact(ProblemInstance.build(3, 0.3, (2.0,), (4.9,))).counts == (3,)

    def test_qos_floor_respected(self):
        # weight of class 1 is tiny but it must still get 4 nodes
        pr = ProblemInstance.build(10, 0.5, (8, 0.01), (10, 6), (0, 0.9))
        r = solve_exact(pr)
        assert r.counts == (6, 4)
        assert r.per_class_success[1] >= 0.9

    def test_infeasible(self):
        with pytest.raises(InfeasibleError):
            solve_exact(ProblemInstance.build(10, 0.5, (8, 5), (3, 5), (0.9, 0)))

    def test_report_consistency(self):
        pr = ProblemInstance.build(20, 0.7, (8, 5, 1), (20, 8, 4))
        r = solve_exact(pr)
        assert r.weighted_sum + r.min_objective == pytest.approx(14, abs=1e-12)
        q = pr.q
        assert r.per_class_success == tuple(1 - q**x for x in r.counts)


class TestProperties:
    def test_oracle_equivalence(self, suite):
        for pr in suite:
            obj, _ = naive_optimum(pr)
            assert solve_exact(pr).min_objective == pytest.approx(obj, abs=1e-12)

    def test_feasible_output(self, suite):
        for pr in suite:
            r = solve_exact(pr)
            assert r.allocation.is_feasible(pr), r.allocation.violations(pr)

    def test_work_bound(self, suite):
        for pr in suite:
            norm = normalize(pr)
            r = solve_exact(pr)
            assert r.iterations == min(norm.residual_nodes, sum(norm.floor_residual_budgets))

    def test_exchange_local_optimality(self, suite):
        for pr in suite:
            x = list(solve_exact(pr).counts)
            base = min_objective(x, pr)
            floors = pr.qos_floors()
            for a in range(len(x)):
                for b in range(len(x)):
                    if a == b or x[a] < floors[a] + 1 or x[b] >= pr.floor_budgets[b]:
                        continue
                    y = list(x)
                    y[a] -= 1
                    y[b] += 1
                    assert min_objective(y, pr) >= base - 1e-12

    @settings(max_examples=60, deadline=None)
    @given(instances(), st.floats(0.01, 0.04))
    def test_monotone_in_p(self, pr, dp):
        hi = min(pr.access_success + dp, 0.99)
        assert solve_exact(pr.with_access(hi)).weighted_sum >= solve_exact(pr).weighted_sum - 1e-12

    @settings(max_examples=60, deadline=None)
    @given(instances(), st.data())
    def test_monotone_in_budget(self, pr, data):
        i = data.draw(st.integers(0, pr.num_classes - 1))
        budgets = list(pr.budgets)
        budgets[i] += data.draw(st.floats(0.0, 3.0))
        bigger = ProblemInstance.build(pr.node_count, pr.access_success, pr.weights, budgets)
        assert solve_exact(bigger).weighted_sum >= solve_exact(pr).weighted_sum - 1e-12

    @settings(max_examples=100, deadline=None)
    @given(instances(), st.sampled_from([0.25, 0.5, 3.0, 7.0, 1 / 3]))
    def test_scale_invariance(self, pr, c):
        scaled = ProblemInstance.build(
            pr.node_count, pr.access_success, [c * w for w in pr.weights], pr.budgets
        )
        assert solve_exact(scaled).counts == solve_exact(pr).counts

    def test_greedy_weights_track_counts(self):
        pr = ProblemInstance.build(12, 0.35, (8, 5, 2), (6, 6, 6))
        norm = normalize(pr)
        s = initial_state(norm)
        while s.remaining_units and s.live:
            s = greedy_step(s, norm.q)
            w = np.array(s.current_weights(norm.q))
            expected = np.array(norm.effective_weights) * norm.q ** np.array(s.counts)
            assert np.array_equal(w, expected)
            assert all(c <= t for c, t in zip(s.counts, s.caps))
