# %% [markdown]
# # Compton attenuation in water
#
# The interaction rate comes from the Klein-Nishina cross section, integrated
# numerically over the scattering angle and multiplied by the electron
# density of water.

# %%
import numpy as np

from qwmc import physics as ph

# %%
for energy in (0.1, 1.0, 10.0, 50.0):
    quad = ph.compton_total(energy)
    closed = ph.klein_nishina_total(energy)
    print(f"E={energy:5.1f} MeV  sigma={quad:.6e} cm^2  "
          f"rel diff vs closed form={abs(quad - closed) / closed:.1e}")

# %% [markdown]
# At 10 MeV the attenuation coefficient is about 0.017 per cm, so a 1 cm step
# absorbs roughly 1.7% of the photons that reach it.

# %%
beam = ph.PhotonBeam(energy=10.0, step_length=1.0, num_steps=15)
mu = ph.linear_attenuation(beam.energy)
schedule = ph.build_schedule(beam)
print(f"mu = {mu:.6f} /cm, p = {schedule[0]:.6f}")
print("survival after 15 cm:", ph.cumulative_survival(schedule)[-1], "=", np.exp(-15 * mu))

# %% [markdown]
# Layered media take one attenuation coefficient per step.

# %%
layers = ph.build_schedule(ph.PhotonBeam(num_steps=4), attenuation=[0.017, 0.017, 0.1, 0.1])
print("layered schedule:", np.round(layers.as_array(), 5))
