# %% [markdown]
# # Recovery probability of a single class
#
# A class is spread over `N` nodes as a row of fractions. The server reaches
# each node independently with probability `p` and succeeds when the reached
# fractions add up to at least one unit. For small `N` the probability is
# computed by enumerating every subset of reachable nodes.

# %%
import numpy as np

from msalloc import general_success_prob, msa_success_prob

# %% [markdown]
# Three nodes, eight different ways to store the same class. Some rows put a
# whole unit on one node, others spread thinner slices over several.

# %%
rows = {
    "whole + half": (1, 1 / 2, 0),
    "quarter + whole": (0, 1 / 4, 1),
    "whole + slices": (1, 3 / 8, 1 / 8),
    "two 5/8": (0, 5 / 8, 5 / 8),
    "3/4, 1/2, 1/4": (3 / 4, 2 / 4, 1 / 4),
    "1/4, 1/4, 3/4": (1 / 4, 1 / 4, 3 / 4),
    "three halves": (1 / 2, 1 / 2, 1 / 2),
    "three 5/12": (5 / 12, 5 / 12, 5 / 12),
}
ps = (0.1, 0.3, 0.5, 0.7, 0.9)
print(f"{'row':>16} " + " ".join(f"p={p:<5}" for p in ps))
for name, row in rows.items():
    print(f"{name:>16} " + " ".join(f"{general_success_prob(row, p):.4f} " for p in ps))

# %% [markdown]
# The three-halves row is the interesting one: for large `p` it beats a single
# whole replica, for small `p` it loses. Where do they cross?

# %%
grid = np.linspace(0.01, 0.99, 99)
diff = np.array([general_success_prob((0.5, 0.5, 0.5), p) - p for p in grid])
print("halves beat one replica from p =", grid[np.argmax(diff > 0)])

# %% [markdown]
# Minimal spreading stores whole replicas on `x` nodes, so the enumeration
# collapses to `1 - (1-p)**x`.

# %%
for x in range(5):
    row = [1.0] * x + [0.0] * (5 - x)
    print(x, general_success_prob(row, 0.6), msa_success_prob(x, q=0.4))
