"""Domain types and exact evaluators for multi-class storage allocation.

A system has ``N`` unit-capacity storage nodes, each reachable with
probability ``p`` (``q = 1 - p`` is the per-node access failure
probability). Every data class ``i`` carries a weight ``alpha_i``, a
storage budget ``T_i`` (in node units) and a minimum recovery probability.

Under a minimal spreading allocation (MSA) class ``i`` is replicated whole
on ``x_i`` distinct nodes, so it is recovered with probability
``1 - q**x_i``. The solvers in this package minimise ``sum(alpha_i * q**x_i)``,
which is the complement of the weighted recovery sum.

Class identity is the index of the class in ``ProblemInstance.classes``.
Solvers key their working state by that index, so removing a class mid-run
never shifts the identity of the others.
"""

from __future__ import annotations

import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np

__all__ = [
    "AllocationError",
    "InfeasibleError",
    "TooLargeError",
    "ExhaustedError",
    "ProblemFormatError",
    "DataClass",
    "ProblemInstance",
    "MsaAllocation",
    "GeneralAllocation",
    "NormalizedProblem",
    "SolveReport",
    "min_nodes_for_qos",
    "normalize",
    "msa_success_prob",
    "weighted_sum",
    "min_objective",
    "make_report",
    "general_success_prob",
    "problem_from_dict",
    "problem_to_dict",
    "RECOVERY_TOL",
    "ENUMERATION_CAP",
]

# Slack on the "collected mass >= 1" recovery test; fractional placements
# such as 1/4 + 1/4 + 1/2 must not flip on round-off.
RECOVERY_TOL = 1e-12

# Largest node count general_success_prob will enumerate (2**N subsets).
ENUMERATION_CAP = 25


class AllocationError(Exception):
    """Base class for solver-level failures."""


class InfeasibleError(AllocationError):
    """The QoS floors cannot be met with the given budgets and nodes."""


class TooLargeError(AllocationError):
    """An exhaustive evaluator was asked to enumerate beyond its cap."""


class ExhaustedError(AllocationError):
    """A greedy step was requested with no class left to receive units."""


class ProblemFormatError(ValueError):
    """A problem document is malformed."""


@dataclass(frozen=True)
class DataClass:
    """One data class: weight, storage budget and QoS floor.

    ``min_nodes`` is an optional integer floor on ``x_i`` that replaces the
    floor derived from ``min_success`` when given.
    """

    weight: float
    budget: float
    min_success: float = 0.0
    min_nodes: int | None = None

    def __post_init__(self):
        if not (math.isfinite(self.weight) and self.weight > 0):
            raise ValueError(f"weight must be positive, got {self.weight!r}")
        if not (math.isfinite(self.budget) and self.budget >= 0):
            raise ValueError(f"budget must be non-negative, got {self.budget!r}")
        if not (0 <= self.min_success < 1):
            raise ValueError(f"min_success must lie in [0, 1), got {self.min_success!r}")
        if self.min_nodes is not None:
            if isinstance(self.min_nodes, bool) or int(self.min_nodes) != self.min_nodes:
                raise ValueError(f"min_nodes must be an integer, got {self.min_nodes!r}")
            if self.min_nodes < 0:
                raise ValueError(f"min_nodes must be non-negative, got {self.min_nodes!r}")
            object.__setattr__(self, "min_nodes", int(self.min_nodes))

    @property
    def floor_budget(self) -> int:
        return math.floor(self.budget)


@dataclass(frozen=True)
class ProblemInstance:
    """``N`` unit nodes with access probability ``p`` holding ``K`` classes."""

    node_count: int
    access_success: float
    classes: tuple[DataClass, ...]

    def __post_init__(self):
        if isinstance(self.node_count, bool) or int(self.node_count) != self.node_count:
            raise ValueError(f"node_count must be an integer, got {self.node_count!r}")
        if self.node_count < 1:
            raise ValueError(f"node_count must be >= 1, got {self.node_count!r}")
        if not (0 < self.access_success < 1):
            raise ValueError(f"access_success must lie in (0, 1), got {self.access_success!r}")
        classes = tuple(self.classes)
        if not classes:
            raise ValueError("at least one data class is required")
        for c in classes:
            if not isinstance(c, DataClass):
                raise TypeError(f"expected DataClass, got {type(c).__name__}")
        object.__setattr__(self, "node_count", int(self.node_count))
        object.__setattr__(self, "classes", classes)

    @classmethod
    def build(cls, node_count, p, weights, budgets, min_success=None, min_nodes=None):
        """Convenience constructor from parallel per-class sequences."""
        k = len(weights)
        if len(budgets) != k:
            raise ValueError("weights and budgets must have equal length")
        min_success = [0.0] * k if min_success is None else list(min_success)
        min_nodes = [None] * k if min_nodes is None else list(min_nodes)
        if len(min_success) != k or len(min_nodes) != k:
            raise ValueError("per-class sequences must have equal length")
        classes = tuple(
            DataClass(float(w), float(t), float(s), m)
            for w, t, s, m in zip(weights, budgets, min_success, min_nodes)
        )
        return cls(node_count, float(p), classes)

    @property
    def q(self) -> float:
        return 1.0 - self.access_success

    @property
    def num_classes(self) -> int:
        return len(self.classes)

    @property
    def weights(self) -> tuple[float, ...]:
        return tuple(c.weight for c in self.classes)

    @property
    def budgets(self) -> tuple[float, ...]:
        return tuple(c.budget for c in self.classes)

    @property
    def floor_budgets(self) -> tuple[int, ...]:
        return tuple(c.floor_budget for c in self.classes)

    def with_access(self, p: float) -> ProblemInstance:
        return replace(self, access_success=p)

    def with_nodes(self, n: int) -> ProblemInstance:
        return replace(self, node_count=n)

    def qos_floors(self) -> tuple[int, ...]:
        q = self.q
        return tuple(
            c.min_nodes if c.min_nodes is not None else min_nodes_for_qos(q, c.min_success)
            for c in self.classes
        )


@dataclass(frozen=True)
class MsaAllocation:
    """Node counts ``x_i`` of a minimal spreading allocation."""

    counts: tuple[int, ...]

    def __post_init__(self):
        counts = tuple(int(x) for x in self.counts)
        if any(x < 0 for x in counts):
            raise ValueError(f"counts must be non-negative, got {counts}")
        object.__setattr__(self, "counts", counts)

    def __len__(self):
        return len(self.counts)

    def __iter__(self):
        return iter(self.counts)

    def __getitem__(self, i):
        return self.counts[i]

    def violations(self, problem: ProblemInstance) -> list[str]:
        """Human-readable list of constraints this allocation breaks."""
        out = []
        if len(self.counts) != problem.num_classes:
            return [f"expected {problem.num_classes} counts, got {len(self.counts)}"]
        if sum(self.counts) > problem.node_count:
            out.append(f"sum of counts {sum(self.counts)} exceeds N={problem.node_count}")
        floors = problem.qos_floors()
        for i, (x, t, lo) in enumerate(zip(self.counts, problem.floor_budgets, floors)):
            if x > t:
                out.append(f"class {i}: x={x} exceeds floor(T)={t}")
            if x < lo:
                out.append(f"class {i}: x={x} below QoS floor {lo}")
        return out

    def is_feasible(self, problem: ProblemInstance) -> bool:
        return not self.violations(problem)

    def to_placement(self, node_count: int) -> GeneralAllocation:
        """Lay the counts out as a 0/1 placement matrix.

        Classes are packed onto consecutive nodes; when the counts sum to
        more than ``node_count`` (only possible outside the capacity
        constraint) the packing wraps around and the result is rejected.
        """
        placement = np.zeros((len(self.counts), node_count))
        start = 0
        for i, x in enumerate(self.counts):
            if x > node_count:
                raise ValueError(f"class {i} needs {x} nodes, only {node_count} exist")
            idx = (start + np.arange(x)) % node_count
            placement[i, idx] = 1.0
            start += x
        return GeneralAllocation(placement)


@dataclass(frozen=True, eq=False)
class GeneralAllocation:
    """Fractional placement ``x[i, n]`` of class ``i`` on node ``n``."""

    placement: np.ndarray

    def __post_init__(self):
        a = np.array(self.placement, dtype=float)
        if a.ndim != 2:
            raise ValueError("placement must be a K x N matrix")
        if np.any(a < 0) or np.any(a > 1):
            raise ValueError("placement entries must lie in [0, 1]")
        if np.any(a.sum(axis=0) > 1 + RECOVERY_TOL):
            raise ValueError("a node holds more than its unit capacity")
        a.setflags(write=False)
        object.__setattr__(self, "placement", a)

    def respects_budgets(self, problem: ProblemInstance) -> bool:
        rows = self.placement.sum(axis=1)
        return bool(np.all(rows <= np.asarray(problem.budgets) + RECOVERY_TOL))

    def success_probs(self, p: float) -> tuple[float, ...]:
        return tuple(general_success_prob(row, p) for row in self.placement)


@dataclass(frozen=True)
class NormalizedProblem:
    """The instance after the QoS floors ``x_min`` are pre-allocated.

    Solving for ``y_i = x_i - x_min_i`` against ``effective_weights`` with
    ``residual_nodes`` units and budgets ``residual_budgets`` is equivalent
    to the original problem.
    """

    residual_nodes: int
    effective_weights: tuple[float, ...]
    residual_budgets: tuple[float, ...]
    qos_floor: tuple[int, ...]
    q: float
    # floor(T_i) - x_min_i, kept as integers so no float noise leaks in
    floor_residual_budgets: tuple[int, ...] = ()

    def is_trivial(self) -> bool:
        """True when every class can take its whole budget."""
        return sum(self.floor_residual_budgets) <= self.residual_nodes

    def denormalize(self, y: Sequence[int]) -> MsaAllocation:
        return MsaAllocation(tuple(int(a) + b for a, b in zip(y, self.qos_floor)))


@dataclass(frozen=True)
class SolveReport:
    allocation: MsaAllocation
    per_class_success: tuple[float, ...]
    weighted_sum: float
    min_objective: float
    method: str
    trace: tuple[str, ...] = field(default_factory=tuple)
    iterations: int = 0

    @property
    def counts(self) -> tuple[int, ...]:
        return self.allocation.counts

    def to_dict(self) -> dict[str, Any]:
        return {
            "method": self.method,
            "allocation": list(self.allocation.counts),
            "per_class_success": list(self.per_class_success),
            "weighted_sum": self.weighted_sum,
            "min_objective": self.min_objective,
            "iterations": self.iterations,
            "trace": list(self.trace),
        }


def min_nodes_for_qos(q: float, min_success: float) -> int:
    """Smallest ``x`` with ``1 - q**x >= min_success``."""
    if not (0 < q < 1):
        raise ValueError(f"q must lie in (0, 1), got {q!r}")
    if not (0 <= min_success < 1):
        raise ValueError(f"min_success must lie in [0, 1), got {min_success!r}")
    if min_success == 0:
        return 0
    x = max(0, math.ceil(math.log(1.0 - min_success) / math.log(q)))
    # the log ratio can land a hair off an integer; settle on the exact test
    while x > 0 and 1.0 - q ** (x - 1) >= min_success:
        x -= 1
    while 1.0 - q**x < min_success:
        x += 1
    return x


def normalize(problem: ProblemInstance) -> NormalizedProblem:
    """Pre-allocate the QoS floors and rescale the weights.

    Raises InfeasibleError when a floor exceeds its class budget or the
    floors together exceed the node count.
    """
    q = problem.q
    floors = problem.qos_floors()
    for i, (m, t) in enumerate(zip(floors, problem.floor_budgets)):
        if m > t:
            raise InfeasibleError(
                f"class {i}: QoS floor of {m} nodes exceeds floor(budget)={t}"
            )
    total = sum(floors)
    if total > problem.node_count:
        raise InfeasibleError(
            f"QoS floors need {total} nodes but only N={problem.node_count} exist"
        )
    return NormalizedProblem(
        residual_nodes=problem.node_count - total,
        effective_weights=tuple(c.weight * q**m for c, m in zip(problem.classes, floors)),
        residual_budgets=tuple(c.budget - m for c, m in zip(problem.classes, floors)),
        qos_floor=floors,
        q=q,
        floor_residual_budgets=tuple(t - m for t, m in zip(problem.floor_budgets, floors)),
    )


def msa_success_prob(x: int, q: float) -> float:
    return 1.0 - q**x


def min_objective(counts: Sequence[int], problem: ProblemInstance) -> float:
    """``sum(alpha_i * q**x_i)``; zero means every class is always recovered."""
    q = problem.q
    return math.fsum(c.weight * q ** int(x) for c, x in zip(problem.classes, counts))


def weighted_sum(counts: Sequence[int], problem: ProblemInstance) -> float:
    """``sum(alpha_i * (1 - q**x_i))``."""
    if len(counts) != problem.num_classes:
        raise ValueError(f"expected {problem.num_classes} counts, got {len(counts)}")
    q = problem.q
    return math.fsum(c.weight * (1.0 - q ** int(x)) for c, x in zip(problem.classes, counts))


def make_report(counts, problem, method, trace=(), iterations=0) -> SolveReport:
    alloc = counts if isinstance(counts, MsaAllocation) else MsaAllocation(tuple(counts))
    q = problem.q
    return SolveReport(
        allocation=alloc,
        per_class_success=tuple(msa_success_prob(x, q) for x in alloc.counts),
        weighted_sum=weighted_sum(alloc.counts, problem),
        min_objective=min_objective(alloc.counts, problem),
        method=method,
        trace=tuple(trace),
        iterations=iterations,
    )


def general_success_prob(row, p: float) -> float:
    """Recovery probability of one class under an arbitrary placement.

    Sums ``p**|r| * (1-p)**(N-|r|)`` over every subset ``r`` of reachable
    nodes whose stored mass reaches one unit. Exhaustive, so ``N`` is capped
    at ``ENUMERATION_CAP``.
    """
    x = np.asarray(row, dtype=float).ravel()
    n = x.size
    if n > ENUMERATION_CAP:
        raise TooLargeError(f"N={n} exceeds the enumeration cap of {ENUMERATION_CAP}")
    if not (0 < p < 1):
        raise ValueError(f"p must lie in (0, 1), got {p!r}")
    if n == 0:
        return 0.0
    q = 1.0 - p
    k = np.arange(n + 1)
    subset_prob = p**k * q ** (n - k)

    # split nodes into a low half (enumerated as a vector) and a high half
    # (looped over); keeps memory at O(2**(N/2)) per block
    lo = min(n, 13)
    lo_mask = np.arange(1 << lo)
    lo_bits = (lo_mask[:, None] >> np.arange(lo)) & 1
    lo_mass = lo_bits @ x[:lo]
    lo_size = lo_bits.sum(axis=1)

    hi = n - lo
    hi_mask = np.arange(1 << hi)
    hi_bits = (hi_mask[:, None] >> np.arange(hi)) & 1
    hi_mass = hi_bits @ x[lo:] if hi else np.zeros(1)
    hi_size = hi_bits.sum(axis=1) if hi else np.zeros(1, dtype=int)

    total = 0.0
    block = max(1, (1 << 20) >> lo)
    for start in range(0, hi_mass.size, block):
        mass = hi_mass[start:start + block, None] + lo_mass[None, :]
        size = hi_size[start:start + block, None] + lo_size[None, :]
        ok = mass >= 1.0 - RECOVERY_TOL
        total += float(subset_prob[size[ok]].sum())
    return min(total, 1.0)


_CLASS_FIELDS = {"weight", "budget", "min_success", "min_nodes"}
_DOC_FIELDS = {"nodes", "p", "classes", "capacities"}


def _number(value, name):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ProblemFormatError(f"{name} must be a number, got {value!r}")
    return value


def problem_from_dict(doc: Mapping[str, Any]) -> tuple[ProblemInstance, tuple[int, ...] | None]:
    """Parse a problem document; returns the instance and optional capacities.

    Unknown fields at either level are rejected.
    """
    if not isinstance(doc, Mapping):
        raise ProblemFormatError("problem document must be a JSON object")
    unknown = set(doc) - _DOC_FIELDS
    if unknown:
        raise ProblemFormatError(f"unknown field(s): {sorted(unknown)}")
    for key in ("nodes", "p", "classes"):
        if key not in doc:
            raise ProblemFormatError(f"missing required field {key!r}")
    nodes = _number(doc["nodes"], "nodes")
    if int(nodes) != nodes:
        raise ProblemFormatError(f"nodes must be an integer, got {nodes!r}")
    p = _number(doc["p"], "p")
    raw_classes = doc["classes"]
    if not isinstance(raw_classes, list):
        raise ProblemFormatError("classes must be an array")
    classes = []
    for i, c in enumerate(raw_classes):
        if not isinstance(c, Mapping):
            raise ProblemFormatError(f"classes[{i}] must be an object")
        unknown = set(c) - _CLASS_FIELDS
        if unknown:
            raise ProblemFormatError(f"classes[{i}]: unknown field(s): {sorted(unknown)}")
        for key in ("weight", "budget"):
            if key not in c:
                raise ProblemFormatError(f"classes[{i}]: missing required field {key!r}")
        min_nodes = c.get("min_nodes")
        if min_nodes is not None:
            _number(min_nodes, f"classes[{i}].min_nodes")
        try:
            classes.append(
                DataClass(
                    weight=float(_number(c["weight"], f"classes[{i}].weight")),
                    budget=float(_number(c["budget"], f"classes[{i}].budget")),
                    min_success=float(_number(c.get("min_success", 0.0), f"classes[{i}].min_success")),
                    min_nodes=min_nodes,
                )
            )
        except ValueError as exc:
            raise ProblemFormatError(f"classes[{i}]: {exc}") from None
    try:
        problem = ProblemInstance(int(nodes), float(p), tuple(classes))
    except ValueError as exc:
        raise ProblemFormatError(str(exc)) from None

    capacities = None
    if "capacities" in doc and doc["capacities"] is not None:
        raw = doc["capacities"]
        if not isinstance(raw, list) or not raw:
            raise ProblemFormatError("capacities must be a non-empty array")
        caps = []
        for n, c in enumerate(raw):
            _number(c, f"capacities[{n}]")
            if int(c) != c or c < 1:
                raise ProblemFormatError(f"capacities[{n}] must be an integer >= 1, got {c!r}")
            caps.append(int(c))
        if len(caps) != problem.node_count:
            raise ProblemFormatError(
                f"capacities has {len(caps)} entries but nodes={problem.node_count}"
            )
        capacities = tuple(caps)
    return problem, capacities


def problem_to_dict(problem: ProblemInstance, capacities=None) -> dict[str, Any]:
    classes = []
    for c in problem.classes:
        entry = {"weight": c.weight, "budget": c.budget, "min_success": c.min_success}
        if c.min_nodes is not None:
            entry["min_nodes"] = c.min_nodes
        classes.append(entry)
    doc = {"nodes": problem.node_count, "p": problem.access_success, "classes": classes}
    if capacities is not None:
        doc["capacities"] = list(capacities)
    return doc
