"""Near-optimal MSA in O(K) per round via the AM-GM relaxation.

Dropping integrality and per-class budgets, ``sum(w_i * q**x_i)`` subject to
``sum(x_i) = n`` is minimised when every term ``w_i * q**x_i`` equals the
same constant, i.e. ``x_i = C - log_q(w_i)``. The relaxed values then sort
the classes into three groups:

* below zero (``K1``): forced to zero, the rest re-solved (may lose optimality)
* at or above ``floor(T_i)`` (``K3``): fixed at the budget, the rest re-solved
* in between (``K2`` only): rounded exactly, largest fractional parts up

Rounds 2 and 3 remove at least one class, so there are at most K rounds.
"""

from __future__ import annotations

import functools
import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .model import ProblemInstance, SolveReport, make_report, normalize

__all__ = [
    "RelaxedSolution",
    "FractionalPart",
    "relaxed_allocation",
    "partition_classes",
    "round_case1",
    "solve_fast",
    "CLASSIFY_TOL",
]

# Slack for comparing relaxed values against 0, floor(T) and integers.
CLASSIFY_TOL = 1e-9


@dataclass(frozen=True)
class FractionalPart:
    class_id: int
    e: float


@dataclass(frozen=True)
class RelaxedSolution:
    """Relaxed values keyed by class id plus the three-way split."""

    values: dict[int, float]
    negative: frozenset[int]
    interior: frozenset[int]
    saturated: frozenset[int]


def relaxed_allocation(n, weights, q) -> np.ndarray:
    """Real-valued minimiser of ``sum(w_i * q**x_i)`` with ``sum(x_i) == n``."""
    w = np.asarray(weights, dtype=float)
    if w.ndim != 1 or w.size == 0:
        raise ValueError("need at least one weight")
    logq_w = np.log(w) / math.log(q)
    return (n + logq_w.sum()) / w.size - logq_w


def partition_classes(values, budgets, tol=CLASSIFY_TOL):
    """Split positions into (negative, interior, saturated) index sets.

    A value exactly at zero is interior; a value at ``floor(T)`` is
    saturated.
    """
    if len(values) != len(budgets):
        raise ValueError("values and budgets must have equal length")
    k1, k2, k3 = set(), set(), set()
    for i, (x, t) in enumerate(zip(values, budgets)):
        if x < -tol:
            k1.add(i)
        elif x >= math.floor(t) - tol:
            k3.add(i)
        else:
            k2.add(i)
    return k1, k2, k3


def _robust_floor(x: float) -> int:
    return math.floor(x + CLASSIFY_TOL)


def fractional_parts(values: Sequence[float]) -> list[FractionalPart]:
    return [
        FractionalPart(i, max(0.0, float(x) - _robust_floor(x))) for i, x in enumerate(values)
    ]


def round_case1(values, n, weights=None) -> list[int]:
    """Round relaxed values to integers summing to ``n``.

    The ``n - sum(floor(x_i))`` classes with the largest fractional parts
    round up. Equal fractional parts (within tolerance) go to the larger
    weight, then the lower position.
    """
    values = [float(x) for x in values]
    weights = [1.0] * len(values) if weights is None else list(weights)
    floors = [_robust_floor(x) for x in values]
    m = min(max(int(n) - sum(floors), 0), len(values))
    parts = fractional_parts(values)

    def order(a: FractionalPart, b: FractionalPart) -> int:
        if abs(a.e - b.e) > CLASSIFY_TOL:
            return -1 if a.e > b.e else 1
        wa, wb = weights[a.class_id], weights[b.class_id]
        if wa != wb:
            return -1 if wa > wb else 1
        return a.class_id - b.class_id

    ranked = sorted(parts, key=functools.cmp_to_key(order))
    out = list(floors)
    for fp in ranked[:m]:
        out[fp.class_id] += 1
    return out


def relax_live(n, live, weights, caps, q) -> RelaxedSolution:
    ids = sorted(live)
    vals = relaxed_allocation(n, [weights[i] for i in ids], q)
    k1, k2, k3 = partition_classes(vals, [caps[i] for i in ids])
    return RelaxedSolution(
        values={i: float(v) for i, v in zip(ids, vals)},
        negative=frozenset(ids[j] for j in k1),
        interior=frozenset(ids[j] for j in k2),
        saturated=frozenset(ids[j] for j in k3),
    )


def solve_fast(problem: ProblemInstance) -> SolveReport:
    """Low-complexity MSA; optimal unless a negative-value round occurs.

    The trace holds one entry per round, prefixed ``trivial``, ``case1``,
    ``case2`` or ``case3``.
    """
    norm = normalize(problem)
    q = norm.q
    weights = norm.effective_weights
    caps = norm.floor_residual_budgets
    y = [0] * len(caps)
    live = set(range(len(caps)))
    n = norm.residual_nodes
    trace = []
    rounds = 0

    while live:
        rounds += 1
        if sum(caps[i] for i in live) <= n:
            for i in live:
                y[i] = caps[i]
            trace.append(f"trivial: classes {sorted(live)} take their budgets")
            break
        relaxed = relax_live(n, live, weights, caps, q)
        if relaxed.negative:
            for i in relaxed.negative:
                y[i] = 0
            live -= relaxed.negative
            trace.append(f"case3: classes {sorted(relaxed.negative)} forced to 0")
        elif relaxed.saturated:
            for i in relaxed.saturated:
                y[i] = caps[i]
            n -= sum(caps[i] for i in relaxed.saturated)
            live -= relaxed.saturated
            trace.append(f"case2: classes {sorted(relaxed.saturated)} fixed at budget")
        else:
            ids = sorted(live)
            rounded = round_case1(
                [relaxed.values[i] for i in ids], n, [weights[i] for i in ids]
            )
            for i, v in zip(ids, rounded):
                y[i] = v
            trace.append(f"case1: rounded classes {ids}")
            break

    alloc = norm.denormalize(y)
    return make_report(alloc, problem, "fast", trace, iterations=rounds)
