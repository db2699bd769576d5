# %% [markdown]
# # Nodes that hold more than one unit
#
# A super-node with capacity `c` behaves like `c` unit nodes when each slot
# is reached independently. When the whole super-node is reached or lost at
# once, placing two replicas on it buys nothing, so a class may use each
# super-node at most once.

# %%
from msalloc import (
    CapacityProfile,
    ProblemInstance,
    expand_independent,
    solve_correlated,
    solve_exact,
    solve_independent,
)

# %% [markdown]
# Independent slots: expand and solve as usual.

# %%
pr = ProblemInstance.build(3, 0.5, (8, 5), (4, 4))
profile = CapacityProfile((3, 2, 1))
print(expand_independent(pr, profile).node_count)
print(solve_independent(pr, profile).counts, solve_exact(pr.with_nodes(6)).counts)

# %% [markdown]
# Correlated access, two super-nodes of capacity two. Both classes end up on
# both super-nodes.

# %%
pr = ProblemInstance.build(2, 0.5, (8, 5), (4, 4))
placement, report = solve_correlated(pr, CapacityProfile((2, 2), "correlated"))
print(placement.assignment)
print(report.per_class_success)
for line in report.trace:
    print(" ", line)

# %% [markdown]
# A single big super-node can hold everything, but every class only ever
# sees one point of access.

# %%
pr = ProblemInstance.build(1, 0.5, (8, 5), (4, 4))
placement, report = solve_correlated(pr, CapacityProfile((5,), "correlated"))
print(placement.assignment, report.per_class_success)

# %% [markdown]
# Uneven capacities: the heaviest class is placed first, on the roomiest
# super-nodes.

# %%
pr = ProblemInstance.build(4, 0.6, (8, 5, 2), (4, 4, 4))
placement, report = solve_correlated(pr, CapacityProfile((3, 1, 2, 1), "correlated"))
print(placement.assignment)
print(report.counts, round(report.weighted_sum, 4))
