# %% [markdown]
# # Estimating survival with iterative amplitude estimation
#
# The good states are those whose position register reached the threshold
# depth.  Powers of the Grover operator rotate the state by ``2 theta`` with
# ``a = sin^2(theta)``; IQAE chooses powers that keep the confidence interval
# on one half of the circle.

# %%
import math

from qwmc import estimation as est
from qwmc import physics as ph
from qwmc import walk as qw

# %%
walk = qw.build_walk(ph.build_schedule(ph.PhotonBeam(num_steps=15)))
good = est.survival_predicate(walk)
a = est.exact_amplitude(walk, good)
sampler = est.GroverSampler(walk, good)
theta = math.asin(math.sqrt(a))
for k in range(4):
    print(f"k={k}  P(good)={sampler.good_probability(k):.6f}  "
          f"sin^2((2k+1)theta)={math.sin((2 * k + 1) * theta) ** 2:.6f}")

# %%
config = est.IqaeConfig(epsilon=0.01, alpha=0.05, shots_per_round=30)
result = est.iqae(walk, good, config, seed=0, sampler=sampler)
print(f"exact a = {a:.6f}")
print(f"estimate = {result.estimate:.6f}  interval = ({result.interval[0]:.6f}, "
      f"{result.interval[1]:.6f})")
print(f"oracle queries = {result.oracle_queries}  "
      f"(budget {est.chernoff_hoeffding_bound(config.epsilon, config.alpha)})")
for r in result.rounds:
    print(f"  k={r['k']:3d} shots={r['shots']:2d} good={r['good']:2d} "
          f"a in [{r['a_interval'][0]:.4f}, {r['a_interval'][1]:.4f}]")

# %% [markdown]
# A partial depth works the same way: ``x = 8`` estimates the chance of
# crossing 8 cm without interacting.

# %%
partial = est.survival_predicate(walk, 8)
print("exact:", est.exact_amplitude(walk, partial),
      "estimate:", est.iqae(walk, partial, config, seed=1).estimate)
