"""Optimal MSA by assigning storage units one at a time.

Each unit goes to the live class with the largest current weight
``beta_j * q**y_j``; giving it that unit multiplies its weight by ``q``.
Because every term ``beta_j * q**y`` is convex and decreasing in ``y``, this
greedy order yields the global minimum of ``sum(alpha_i * q**x_i)``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .model import (
    ExhaustedError,
    NormalizedProblem,
    ProblemInstance,
    SolveReport,
    make_report,
    normalize,
)

__all__ = ["GreedyState", "greedy_step", "initial_state", "run_greedy", "solve_exact"]

# Relative slack under which two current weights count as tied.
TIE_RTOL = 1e-12


@dataclass(frozen=True)
class GreedyState:
    """Snapshot of the unit-by-unit assignment.

    ``base_weights`` and ``caps`` are keyed by class id (index); only ids in
    ``live`` may still receive units.
    """

    remaining_units: int
    live: frozenset[int]
    base_weights: tuple[float, ...]
    caps: tuple[int, ...]
    counts: tuple[int, ...]

    def current_weight(self, j: int, q: float) -> float:
        # recomputed from the exponent rather than by repeated multiplication
        return self.base_weights[j] * q ** self.counts[j]

    def current_weights(self, q: float) -> tuple[float, ...]:
        return tuple(self.current_weight(j, q) for j in range(len(self.counts)))


def initial_state(norm: NormalizedProblem) -> GreedyState:
    caps = norm.floor_residual_budgets
    return GreedyState(
        remaining_units=norm.residual_nodes,
        live=frozenset(j for j, t in enumerate(caps) if t > 0),
        base_weights=norm.effective_weights,
        caps=caps,
        counts=(0,) * len(caps),
    )


def _argmax_weight(state: GreedyState, q: float) -> int:
    best, best_w = None, -1.0
    for j in sorted(state.live):
        w = state.current_weight(j, q)
        if best is None or w > best_w * (1 + TIE_RTOL):
            best, best_w = j, w
    return best


def greedy_step(state: GreedyState, q: float) -> GreedyState:
    """Give one unit to the heaviest live class (lowest id on ties)."""
    if state.remaining_units < 1:
        raise ExhaustedError("no storage units left to assign")
    if not state.live:
        raise ExhaustedError(f"{state.remaining_units} unit(s) left but no class can take them")
    j = _argmax_weight(state, q)
    counts = list(state.counts)
    counts[j] += 1
    live = state.live
    if counts[j] >= state.caps[j]:
        live = live - {j}
    return replace(
        state,
        remaining_units=state.remaining_units - 1,
        live=live,
        counts=tuple(counts),
    )


def run_greedy(state: GreedyState, q: float) -> tuple[GreedyState, int]:
    """Step until the units or the live classes run out; returns the step count."""
    steps = 0
    while state.remaining_units > 0 and state.live:
        state = greedy_step(state, q)
        steps += 1
    return state, steps


def solve_exact(problem: ProblemInstance) -> SolveReport:
    """Globally optimal MSA counts for ``problem``.

    Raises InfeasibleError when the QoS floors cannot be satisfied.
    """
    norm = normalize(problem)
    trace = []
    if any(norm.qos_floor):
        trace.append(f"qos floors {list(norm.qos_floor)}; residual nodes {norm.residual_nodes}")
    if norm.is_trivial():
        trace.append("trivial: every class takes floor(T_i)")
    final, steps = run_greedy(initial_state(norm), norm.q)
    trace.append(f"greedy: {steps} unit(s) assigned")
    alloc = norm.denormalize(final.counts)
    return make_report(alloc, problem, "exact", trace, iterations=steps)
