# %% [markdown]
# # Error against query count
#
# IQAE error falls roughly as ``1/N_q``; plain sampling of the same survival
# probability with a matched number of photons falls as ``1/sqrt(N_q)``.

# %%
from collections import defaultdict

import numpy as np

from qwmc import baseline as bl
from qwmc import physics as ph

# %%
schedule = ph.build_schedule(ph.PhotonBeam(num_steps=15))
rows = bl.scaling_experiment(schedule, bl.SCALING_EPSILONS, replications=20, seed=0)
print("fitted slopes:", bl.slopes(rows))

# %%
table = defaultdict(list)
for r in rows:
    table[(r["method"], r["epsilon"])].append((r["oracle_queries"], r["abs_error"]))
for (method, eps), vals in sorted(table.items()):
    n, e = np.median(vals, axis=0)
    print(f"{method:>9} eps={eps:<6} median N_q={n:8.0f}  median |error|={e:.2e}")

# %% [markdown]
# The same rows can be written as plot-ready CSV:
# ``qwmc scaling --out scaling.csv``.
