"""Storage nodes with integer capacity ``c_n >= 1``.

A node of capacity ``c_n`` is treated as ``c_n`` unit sub-nodes. Two access
models are supported:

``independent``
    every sub-node is reached on its own with probability ``p``; the system
    is just a unit-node system with ``sum(c_n)`` nodes.
``correlated``
    all sub-nodes of a super-node are reached together or not at all, so a
    class gains nothing from a second copy on the same super-node. Placement
    is done class by class, largest allocation first, on the super-nodes
    with the most room left. This placement is a heuristic.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .exact import solve_exact
from .model import (
    InfeasibleError,
    ProblemInstance,
    SolveReport,
    make_report,
)

__all__ = [
    "AccessMode",
    "CapacityProfile",
    "SuperNodePlacement",
    "expand_independent",
    "solve_correlated",
    "solve_independent",
]


class AccessMode(str, Enum):
    INDEPENDENT = "independent"
    CORRELATED = "correlated"


@dataclass(frozen=True)
class CapacityProfile:
    capacities: tuple[int, ...]
    access_mode: AccessMode = AccessMode.INDEPENDENT

    def __post_init__(self):
        caps = tuple(self.capacities)
        if not caps:
            raise ValueError("at least one super-node is required")
        for c in caps:
            if isinstance(c, bool) or int(c) != c or c < 1:
                raise ValueError(f"capacities must be integers >= 1, got {c!r}")
        object.__setattr__(self, "capacities", tuple(int(c) for c in caps))
        object.__setattr__(self, "access_mode", AccessMode(self.access_mode))

    @property
    def total(self) -> int:
        return sum(self.capacities)


@dataclass(frozen=True, eq=False)
class SuperNodePlacement:
    """Units of class ``i`` on super-node ``n`` (``K x N`` integers)."""

    assignment: np.ndarray

    def __post_init__(self):
        a = np.array(self.assignment, dtype=np.int64)
        if a.ndim != 2 or np.any(a < 0):
            raise ValueError("assignment must be a non-negative K x N integer matrix")
        a.setflags(write=False)
        object.__setattr__(self, "assignment", a)

    def distinct_nodes(self) -> tuple[int, ...]:
        return tuple(int(v) for v in (self.assignment > 0).sum(axis=1))

    def fits(self, profile: CapacityProfile) -> bool:
        used = self.assignment.sum(axis=0)
        return bool(np.all(used <= np.asarray(profile.capacities)))

    def to_dict(self) -> dict:
        return {"assignment": self.assignment.tolist()}


def expand_independent(problem: ProblemInstance, profile: CapacityProfile) -> ProblemInstance:
    """Replace the node count by the total number of unit sub-nodes."""
    return problem.with_nodes(profile.total)


def solve_independent(problem: ProblemInstance, profile: CapacityProfile, solver=solve_exact):
    return solver(expand_independent(problem, profile))


def _pick_largest(counts: dict[int, int], weights) -> int:
    return min(counts, key=lambda i: (-counts[i], -weights[i], i))


def solve_correlated(
    problem: ProblemInstance, profile: CapacityProfile
) -> tuple[SuperNodePlacement, SolveReport]:
    """Place classes on super-nodes under whole-node access failures.

    Each round re-solves the MSA counts for the remaining classes with the
    remaining capacity, budgets capped at the number of open super-nodes,
    then commits only the class with the largest count. Its units go one per
    super-node onto the open super-nodes with the most residual capacity
    (lowest index on ties); super-nodes left empty are closed.

    The report's counts are distinct super-nodes per class, so its success
    probabilities are ``1 - q**count``.
    """
    if len(profile.capacities) != problem.node_count:
        raise ValueError(
            f"profile has {len(profile.capacities)} super-nodes, problem has N={problem.node_count}"
        )
    k = problem.num_classes
    weights = problem.weights
    residual = list(profile.capacities)
    open_nodes = set(range(len(residual)))
    live = list(range(k))
    assignment = np.zeros((k, len(residual)), dtype=np.int64)
    trace = ["heuristic: correlated super-node placement"]
    rounds = 0

    while live and open_nodes:
        rounds += 1
        width = len(open_nodes)
        sub = ProblemInstance(
            node_count=sum(residual[n] for n in open_nodes),
            access_success=problem.access_success,
            classes=tuple(
                replace(problem.classes[i], budget=min(problem.classes[i].budget, width))
                for i in live
            ),
        )
        try:
            inner = solve_exact(sub)
        except InfeasibleError as exc:
            raise InfeasibleError(f"round {rounds}: {exc}") from None
        counts = {i: x for i, x in zip(live, inner.counts)}
        m = _pick_largest(counts, weights)
        targets = sorted(open_nodes, key=lambda n: (-residual[n], n))[: counts[m]]
        for n in targets:
            assignment[m, n] += 1
            residual[n] -= 1
        filled = {n for n in open_nodes if residual[n] == 0}
        open_nodes -= filled
        live.remove(m)
        trace.append(
            f"round {rounds}: class {m} on super-nodes {sorted(targets)}"
            + (f"; closed {sorted(filled)}" if filled else "")
        )

    placement = SuperNodePlacement(assignment)
    counts = placement.distinct_nodes()
    floors = problem.qos_floors()
    short = [i for i in live if floors[i] > 0]
    if short:
        raise InfeasibleError(f"no capacity left for classes {short} with positive QoS floors")
    report = make_report(counts, problem, "exact", trace, iterations=rounds)
    return placement, report

