# %% [markdown]
# # Checking by simulation, and sweeping `p`
#
# Monte Carlo draws which nodes answer and counts how often the reached
# fractions reach one unit. Each run is seeded, so the numbers below repeat.

# %%
import numpy as np

from msalloc import general_success_prob, monte_carlo_recovery, random_msa, sweep, sweep_csv
from msalloc.analysis import preset

# %%
rng = np.random.default_rng(3)
for i in range(5):
    row = rng.uniform(0, 1, 6)
    est, se = monte_carlo_recovery(row, 0.55, trials=100_000, seed=i)
    exact = general_success_prob(row, 0.55)
    print(f"estimate {est:.4f} +- {se:.4f}  enumeration {exact:.4f}  z={(est - exact) / se:+.2f}")

# %% [markdown]
# A random allocation picks node counts without looking at the weights. On
# the third preset it trails the optimum everywhere.

# %%
fig5 = preset("fig5", 0.5)
mean, std = random_msa(fig5, seed=42, realizations=100)
print(f"random {mean:.3f} +- {std:.3f}")

# %%
rows = sweep(preset("fig5"), 0.1, 0.9, 9, seed=42, realizations=100)
print(sweep_csv(rows))

# %% [markdown]
# The same table comes out of the command line:
#
#     msalloc presets fig5 --steps 9 --p-min 0.1 --p-max 0.9 --seed 42
