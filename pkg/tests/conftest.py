import itertools
import math

import numpy as np
import pytest
from hypothesis import strategies as st

from msalloc import InfeasibleError, ProblemInstance, normalize

SUITE_SEED = 20240601
SUITE_SIZE = 250


def random_instance(rng, max_nodes=15, max_classes=4, qos=True):
    """Feasible instance with N <= max_nodes and K <= max_classes."""
    while True:
        n = int(rng.integers(1, max_nodes + 1))
        k = int(rng.integers(1, max_classes + 1))
        weights = rng.uniform(0.1, 10.0, k)
        budgets = rng.uniform(0.0, n, k)
        if qos:
            floors = [0.0 if rng.random() < 0.5 else float(rng.uniform(0.0, 0.9)) for _ in range(k)]
        else:
            floors = [0.0] * k
        p = float(rng.uniform(0.05, 0.95))
        problem = ProblemInstance.build(n, p, weights, budgets, floors)
        try:
            normalize(problem)
        except InfeasibleError:
            continue
        return problem


def make_suite(seed=SUITE_SEED, size=SUITE_SIZE, **kw):
    rng = np.random.default_rng(seed)
    return [random_instance(rng, **kw) for _ in range(size)]


@pytest.fixture(scope="session")
def suite():
    return make_suite()


def naive_optimum(problem):
    """Plain product-and-filter search, independent of the library oracle."""
    q = problem.q
    floors = problem.qos_floors()
    ranges = [range(m, t + 1) for m, t in zip(floors, problem.floor_budgets)]
    best = None
    for x in itertools.product(*ranges):
        if sum(x) > problem.node_count:
            continue
        obj = sum(c.weight * q**xi for c, xi in zip(problem.classes, x))
        if best is None or obj < best[0]:
            best = (obj, x)
    return best


def scan_min_nodes(q, min_success):
    x = 0
    while 1 - q**x < min_success:
        x += 1
    return x


def lemma_closed_form(n, weights, q):
    """Relaxed optimum written with the product form of the closed expression."""
    k = len(weights)
    out = []
    for i, a in enumerate(weights):
        others = math.prod(w for j, w in enumerate(weights) if j != i)
        out.append(n / k + math.log(others / a ** (k - 1), q) / k)
    return out


@st.composite
def instances(draw, max_nodes=12, max_classes=4, qos=False):
    n = draw(st.integers(1, max_nodes))
    k = draw(st.integers(1, max_classes))
    weights = draw(st.lists(st.floats(0.1, 10.0), min_size=k, max_size=k))
    budgets = draw(st.lists(st.floats(0.0, float(n)), min_size=k, max_size=k))
    p = draw(st.floats(0.05, 0.95))
    floors = [0.0] * k
    if qos:
        floors = draw(st.lists(st.sampled_from([0.0, 0.3, 0.6]), min_size=k, max_size=k))
    return ProblemInstance.build(n, p, weights, budgets, floors)
