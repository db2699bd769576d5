"""Bounds, oracles, baselines and parameter sweeps."""

from __future__ import annotations

import csv
import io
import itertools
import math
import statistics
from dataclasses import astuple, dataclass

import numpy as np
from scipy.stats import binom

from .exact import solve_exact
from .fast import solve_fast
from .model import (
    RECOVERY_TOL,
    ProblemInstance,
    SolveReport,
    TooLargeError,
    make_report,
    min_objective,
    normalize,
    weighted_sum,
)

__all__ = [
    "SweepRow",
    "GapThreshold",
    "upper_bound",
    "gap_threshold_p",
    "count_feasible",
    "brute_force_msa",
    "random_allocation",
    "random_msa",
    "monte_carlo_recovery",
    "sweep",
    "sweep_csv",
    "PRESETS",
    "preset",
    "CSV_HEADER",
    "ORACLE_CAP",
    "DEFAULT_REALIZATIONS",
    "DEFAULT_TRIALS",
]

ORACLE_CAP = 10**7
DEFAULT_REALIZATIONS = 100
DEFAULT_TRIALS = 10**5
MC_CHUNK = 1 << 14

CSV_HEADER = ("p", "exact", "fast", "bound", "random_mean", "random_std")


@dataclass(frozen=True)
class SweepRow:
    p: float
    exact_ws: float
    fast_ws: float
    bound: float
    random_mean: float
    random_std: float


@dataclass(frozen=True)
class GapThreshold:
    """Access probabilities above which optimal MSA is within ``epsilon`` of
    perfect recovery (unbounded budgets).

    ``statement_form`` and ``proof_form`` differ only in the exponent applied
    to the weight-ratio term; both are kept because they do not agree.
    """

    statement_form: float
    proof_form: float
    epsilon: float

    @property
    def degenerate(self) -> bool:
        return self.statement_form <= 0

    def to_dict(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "statement_form": self.statement_form,
            "proof_form": self.proof_form,
            "degenerate": self.degenerate,
        }


def upper_bound(problem: ProblemInstance) -> float:
    """Upper bound on the weighted recovery sum of any allocation.

    Class ``i`` can collect at most ``min(r*T_i/N, 1)`` units from ``r``
    reachable nodes; averaging over ``r ~ Binomial(N, p)`` bounds its
    recovery probability.
    """
    n, p = problem.node_count, problem.access_success
    r = np.arange(n + 1)
    pmf = binom.pmf(r, n, p)
    total = 0.0
    for c in problem.classes:
        frac = np.minimum(r * c.budget / n, 1.0)
        total += c.weight * math.fsum(frac * pmf)
    return total


def _pow_limit(base: float, exponent: float) -> float:
    if math.isinf(exponent):
        return 0.0 if base < 1 else (1.0 if base == 1 else math.inf)
    return base**exponent


def gap_threshold_p(weights, n: int, epsilon: float) -> GapThreshold:
    """Threshold on ``p`` for a perfect-recovery gap below ``epsilon``.

    Assumes ``T_i = N`` for every class. The weight-ratio term divides the
    smallest weight raised to ``K-1`` by the product of the other ``K-1``
    weights; with all weights equal it is 1.
    """
    w = [float(a) for a in weights]
    if not w or any(a <= 0 for a in w):
        raise ValueError("weights must be a non-empty list of positive numbers")
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    k = len(w)
    a_min = min(w)
    others = list(w)
    others.remove(a_min)
    ratio = a_min ** (k - 1) / math.prod(others)
    energy = (epsilon**k / (k**k * math.prod(w))) ** (1.0 / n)

    stmt_exp = math.inf if n == 1 else 1.0 / abs(n - 1)
    proof_exp = abs(n / k - 1)
    return GapThreshold(
        statement_form=1.0 - min(energy, _pow_limit(ratio, stmt_exp)),
        proof_form=1.0 - min(energy, _pow_limit(ratio, proof_exp)),
        epsilon=epsilon,
    )


def _ranges(problem: ProblemInstance):
    norm = normalize(problem)
    return norm, [range(m, t + 1) for m, t in zip(norm.qos_floor, problem.floor_budgets)]


def count_feasible(problem: ProblemInstance) -> int:
    """Number of integer count vectors satisfying every MSA constraint."""
    norm, _ = _ranges(problem)
    cap = norm.residual_nodes
    # ways[s] = number of partial vectors using s residual units
    ways = [1] + [0] * cap
    for t in norm.floor_residual_budgets:
        nxt = [0] * (cap + 1)
        for s, c in enumerate(ways):
            if c:
                for y in range(min(t, cap - s) + 1):
                    nxt[s + y] += c
        ways = nxt
    return sum(ways)


def _feasible_vectors(ranges, n):
    """Count vectors drawn from ``ranges`` whose sum stays within ``n``."""
    lows = [r.start for r in ranges]
    # smallest sum the classes after position i can still reach
    tail_min = list(itertools.accumulate(reversed(lows), initial=0))[::-1]

    def walk(i, used, prefix):
        if i == len(ranges):
            yield tuple(prefix)
            return
        for x in ranges[i]:
            if used + x + tail_min[i + 1] > n:
                break
            prefix.append(x)
            yield from walk(i + 1, used + x, prefix)
            prefix.pop()

    return walk(0, 0, [])


def brute_force_msa(problem: ProblemInstance, cap: int = ORACLE_CAP) -> SolveReport:
    """Exhaustive optimum over every feasible count vector."""
    norm, ranges = _ranges(problem)
    total = count_feasible(problem)
    if total > cap:
        raise TooLargeError(f"{total} feasible allocations exceed the oracle cap of {cap}")
    best, best_obj = None, math.inf
    for x in _feasible_vectors(ranges, problem.node_count):
        obj = min_objective(x, problem)
        if obj < best_obj:
            best, best_obj = x, obj
    return make_report(best, problem, "oracle", [f"enumerated {total} allocations"], total)


def random_allocation(problem: ProblemInstance, rng: np.random.Generator) -> tuple[int, ...]:
    """One random MSA: QoS floors first, then units to uniformly chosen open classes."""
    norm = normalize(problem)
    x = list(norm.qos_floor)
    caps = problem.floor_budgets
    remaining = norm.residual_nodes
    open_ids = [i for i in range(len(x)) if x[i] < caps[i]]
    while remaining > 0 and open_ids:
        j = open_ids[rng.integers(len(open_ids))]
        x[j] += 1
        remaining -= 1
        if x[j] >= caps[j]:
            open_ids.remove(j)
    return tuple(x)


def _streams(seed: int, count: int):
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(count)]


def random_allocations(problem: ProblemInstance, seed: int, realizations: int):
    return [random_allocation(problem, rng) for rng in _streams(seed, realizations)]


def random_msa(problem: ProblemInstance, seed: int, realizations: int = DEFAULT_REALIZATIONS):
    """Mean and sample std of the weighted sum over random MSAs.

    Realization ``r`` draws from its own stream spawned from ``seed``, so
    the result does not depend on evaluation order.
    """
    if realizations < 1:
        raise ValueError("realizations must be >= 1")
    values = [weighted_sum(x, problem) for x in random_allocations(problem, seed, realizations)]
    std = statistics.stdev(values) if realizations > 1 else 0.0
    return statistics.fmean(values), std


def monte_carlo_recovery(row, p: float, trials: int = DEFAULT_TRIALS, seed: int = 0):
    """Simulated recovery probability of one placement row.

    Trials are drawn in fixed-size chunks; chunk ``c`` uses a stream keyed by
    ``(seed, c)``, so chunks can be evaluated in any order with identical
    results. Returns ``(estimate, binomial standard error)``; the error is
    evaluated at ``(hits + 0.5) / (trials + 1)``.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    x = np.asarray(row, dtype=float).ravel()
    hits = 0
    for c, start in enumerate(range(0, trials, MC_CHUNK)):
        size = min(MC_CHUNK, trials - start)
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(c,)))
        up = rng.random((size, x.size)) < p
        hits += int(np.count_nonzero(up @ x >= 1.0 - RECOVERY_TOL))
    est = hits / trials
    # add-half proportion keeps the error bar nonzero when every trial agrees
    shrunk = (hits + 0.5) / (trials + 1)
    return est, math.sqrt(shrunk * (1.0 - shrunk) / trials)


def sweep(
    problem: ProblemInstance,
    p_min: float,
    p_max: float,
    steps: int,
    seed: int,
    realizations: int = DEFAULT_REALIZATIONS,
) -> list[SweepRow]:
    """Exact, fast, bound and random baseline on an even grid of ``p``.

    The random baseline reuses ``seed`` at every grid point.
    """
    if not (0 < p_min <= p_max < 1):
        raise ValueError("need 0 < p_min <= p_max < 1")
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if steps == 1 and p_min != p_max:
        raise ValueError("steps=1 needs p_min == p_max")
    rows = []
    for p in np.linspace(p_min, p_max, steps):
        inst = problem.with_access(float(p))
        mean, std = random_msa(inst, seed, realizations)
        rows.append(
            SweepRow(
                p=float(p),
                exact_ws=solve_exact(inst).weighted_sum,
                fast_ws=solve_fast(inst).weighted_sum,
                bound=upper_bound(inst),
                random_mean=mean,
                random_std=std,
            )
        )
    return rows


def sweep_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in rows:
        writer.writerow([repr(v) for v in astuple(row)])
    return buf.getvalue()


PRESETS = {
    "fig3": dict(nodes=20, budgets=(20, 8, 4), weights=(8, 5, 1), min_nodes=None),
    "fig4": dict(nodes=15, budgets=(15, 15, 15), weights=(6, 4, 1), min_nodes=None),
    "fig5": dict(nodes=25, budgets=(8, 15, 23), weights=(1, 5, 8), min_nodes=(1, 1, 1)),
}


def preset(name: str, p: float = 0.5) -> ProblemInstance:
    """Built-in three-class instance ``fig3``, ``fig4`` or ``fig5``."""
    try:
        cfg = PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
    return ProblemInstance.build(
        cfg["nodes"], p, cfg["weights"], cfg["budgets"], min_nodes=cfg["min_nodes"]
    )

