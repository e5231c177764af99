# %% [markdown]
# # Statevector basics
#
# A dense simulator over ``2**n`` complex amplitudes.  Qubit 0 is the least
# significant bit of the basis index, so a bitstring ``"q2 q1 q0"`` reads
# right to left.

# %%
import math

import numpy as np

from qwmc import statevector as sv

# %% [markdown]
# A Y rotation with angle ``2 asin(sqrt(p))`` puts probability ``p`` on ``|1>``.

# %%
p = 0.3
circ = sv.Circuit(1, [sv.ry(0, 2 * math.asin(math.sqrt(p)))])
state = sv.run(circ)
print("amplitudes:", np.round(state.amplitudes.real, 6))
print("probabilities:", sv.probabilities(state))

# %% [markdown]
# Controls carry a polarity.  Here the increment fires only when qubit 2 is 0.

# %%
circ = sv.Circuit(3, [sv.x(0), sv.increment([0, 1], controls=[2], polarity=[0])])
state = sv.run(circ)
print("basis index after increment:", int(np.argmax(sv.probabilities(state))))

# %% [markdown]
# Any circuit followed by its inverse is the identity.

# %%
rng = np.random.default_rng(0)
ops = [sv.ry(int(q), rng.uniform(-3, 3)) for q in rng.integers(0, 4, 20)]
ops += [sv.mcx([0, 1], 3), sv.increment([1, 2, 3])]
circ = sv.Circuit(4, ops)
state = sv.apply_circuit(sv.run(circ), circ.inverse())
print("|<0|C^-1 C|0>|:", abs(state.amplitudes[0]))

# %% [markdown]
# Seeded sampling returns bitstring counts with qubit ``n-1`` first.

# %%
record = sv.sample(sv.run(sv.Circuit(2, [sv.ry(0, math.pi / 2), sv.x(1)])), 10_000, seed=1)
print(record.counts)
