# %% [markdown]
# # Greedy optimum versus relax-and-round
#
# Several classes compete for `N` nodes. Class `i` has weight `alpha_i` and
# may use at most `T_i` nodes. The greedy solver hands out nodes one at a time
# to whichever class loses the most weighted failure probability. The fast
# solver solves the continuous relaxation in closed form and rounds.

# %%
from msalloc import ProblemInstance, solve_exact, solve_fast

# %% [markdown]
# Three nodes, two classes. The heavier class gets two replicas.

# %%
small = ProblemInstance.build(3, 0.5, weights=(8, 5), budgets=(3, 3))
report = solve_exact(small)
print(report.counts, report.per_class_success, report.weighted_sum)
print(report.trace)

# %% [markdown]
# On fifteen nodes with weights (6, 4, 1) the relaxation lands between
# integers. Rounding keeps the total at fifteen.

# %%
pr = ProblemInstance.build(15, 0.5, (6, 4, 1), (15, 15, 15))
fast = solve_fast(pr)
print("fast ", fast.counts, fast.min_objective, fast.trace)
print("exact", solve_exact(pr).counts, solve_exact(pr).min_objective)

# %% [markdown]
# Here the light class 0 gets a negative relaxed share, because the relaxation
# pretends class 1 can soak up more than its single allowed node. The fast
# solver drops class 0 for good and gives its node to class 2, whose fifth
# replica is worth less than class 0's first.

# %%
pr = ProblemInstance.build(6, 0.5, (1, 9, 8), (5, 1, 5))
for solve in (solve_exact, solve_fast):
    r = solve(pr)
    print(f"{r.method:>5} {r.counts} objective {r.min_objective:.6f} trace {r.trace}")

# %% [markdown]
# QoS floors reserve nodes before anything else is shared out. Class 1 has a
# tiny weight but demands 90% recovery, so it keeps four nodes.

# %%
pr = ProblemInstance.build(10, 0.5, (8, 0.01), (10, 6), min_success=(0, 0.9))
print(solve_exact(pr).counts)
