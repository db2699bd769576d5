# %% [markdown]
# # How far is the optimum from what any allocation could do?
#
# The upper bound lets every class use fractional slices freely. With `r`
# reachable nodes, class `i` collects at most `min(r*T_i/N, 1)` units, and `r`
# is binomial.

# %%
import numpy as np

from msalloc import ProblemInstance, gap_threshold_p, solve_exact, upper_bound
from msalloc.analysis import preset

# %%
fig3 = preset("fig3")
total = sum(fig3.weights)
print(f"{'p':>5} {'exact':>9} {'bound':>9} {'rel gap':>9}")
for p in np.round(np.arange(0.1, 1.0, 0.1), 2):
    pr = fig3.with_access(float(p))
    exact, bound = solve_exact(pr).weighted_sum, upper_bound(pr)
    print(f"{p:5.2f} {exact:9.4f} {bound:9.4f} {(bound - exact) / total:9.2e}")

# %% [markdown]
# The gap never closes exactly on this instance but it shrinks fast once `p`
# passes about 0.6, falling below 1e-5 by 0.9.
#
# With unbounded budgets the question turns around: how large must `p` be
# for the optimum to sit within `eps` of perfect recovery? The threshold comes
# in two forms that differ in one exponent.

# %%
fig4 = preset("fig4")
th = gap_threshold_p(fig4.weights, fig4.node_count, 0.1)
print(th.to_dict())
for p in (0.55, th.statement_form, 0.6, 0.7):
    gap = sum(fig4.weights) - solve_exact(fig4.with_access(float(p))).weighted_sum
    print(f"p={p:.4f} gap={gap:.4f}")

# %% [markdown]
# The two forms disagree by a lot here. The first is much tighter. On small
# instances with more than one class it can also be too optimistic, because
# integer node counts lose more than the relaxation accounts for.

# %%
w, n, eps = (9.0, 2.0), 4, 0.5
th = gap_threshold_p(w, n, eps)
p = th.statement_form + 0.01
pr = ProblemInstance.build(n, p, w, (n, n))
print(th.statement_form, sum(w) - solve_exact(pr).weighted_sum, "vs eps", eps)
