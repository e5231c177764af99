# %% [markdown]
# # Depth distribution from the quantum walk
#
# Each step checks whether the walker sits at depth ``k``, rotates the coin by
# the step's interaction probability, clears the check flag and advances the
# position when the coin says "no interaction".  The final state holds one
# branch per absorption depth plus the survivor.

# %%
import numpy as np

from qwmc import baseline as bl
from qwmc import physics as ph
from qwmc import walk as qw

# %%
schedule = ph.build_schedule(ph.PhotonBeam(num_steps=15))
walk = qw.build_walk(schedule)
print(qw.qubit_report(walk.layout, schedule))

# %% [markdown]
# The statevector reproduces the classical chain product exactly.

# %%
exact = qw.walk_distribution(walk)
chain = bl.exact_chain_distribution(schedule)
print("max bin difference:", np.max(np.abs(exact.as_array() - chain.as_array())))

# %% [markdown]
# Sampling the walk and running classical Monte Carlo give two noisy
# estimates of the same distribution.

# %%
from qwmc import statevector as sv

state = sv.run(walk.circuit)
quantum = qw.sampled_distribution(state, walk.layout, 15, 500_000, np.random.default_rng(0))
classical = bl.mc_transport(bl.McConfig(schedule, 1_000_000, seed=1))
report = bl.compare(quantum, classical)
print(f"MSE {report.mse:.2e}  KL {report.kl_divergence:.2e}")
for label, q, c in zip(exact.labels()[-4:], quantum.as_array()[-4:], classical.as_array()[-4:]):
    print(f"{label:>12}  quantum {q:.5f}  classical {c:.5f}")
