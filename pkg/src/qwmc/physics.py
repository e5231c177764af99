"""Compton attenuation of high-energy photons and per-step interaction probabilities.

Cross sections are per electron in cm^2; the linear attenuation coefficient is
the electron number density times the Compton cross section.  Only the
Compton channel is implemented; other channels are enumerated so that a
caller can see what is left out.

The Klein-Nishina differential cross section carries the conventional factor
1/2 in front of ``r_e**2``.  Without it the total cross section and the
attenuation coefficient come out twice the tabulated values for water.
"""
from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import QuadratureError, ValidationError

AVOGADRO = 6.02214076e23  # 1/mol
CLASSICAL_ELECTRON_RADIUS = 2.8179403262e-13  # cm
ELECTRON_REST_ENERGY = 0.51099895  # MeV
WATER_MOLAR_MASS = 18.015  # g/mol
WATER_ELECTRONS_PER_MOLECULE = 10
WATER_DENSITY = 1.0  # g/cm^3

QUADRATURE_NODES = 256


@dataclass(frozen=True)
class PhysicsConstants:
    classical_electron_radius: float = CLASSICAL_ELECTRON_RADIUS
    electron_rest_energy: float = ELECTRON_REST_ENERGY
    electron_density: float = (AVOGADRO * WATER_ELECTRONS_PER_MOLECULE
                               / WATER_MOLAR_MASS * WATER_DENSITY)  # electrons/cm^3

    def __post_init__(self):
        for name in ("classical_electron_radius", "electron_rest_energy", "electron_density"):
            if not getattr(self, name) > 0:
                raise ValidationError(f"{name} must be positive")


WATER = PhysicsConstants()


class Channel(enum.Enum):
    PHOTOELECTRIC = "photoelectric"
    COHERENT = "coherent"
    COMPTON = "compton"
    PAIR = "pair"
    TRIPLET = "triplet"
    PHOTONUCLEAR = "photonuclear"


@dataclass(frozen=True)
class PhotonBeam:
    energy: float = 10.0  # MeV
    step_length: float = 1.0  # cm
    num_steps: int = 15

    def __post_init__(self):
        if not self.energy > 0:
            raise ValidationError(f"beam energy must be positive, got {self.energy}")
        if not self.step_length > 0:
            raise ValidationError(f"step length must be positive, got {self.step_length}")
        if int(self.num_steps) != self.num_steps or self.num_steps < 1:
            raise ValidationError(f"num_steps must be an integer >= 1, got {self.num_steps}")


@dataclass(frozen=True)
class StepSchedule:
    """Interaction probability for each step of the walk."""

    probabilities: tuple = field(default_factory=tuple)

    def __post_init__(self):
        probs = tuple(float(p) for p in self.probabilities)
        if not probs:
            raise ValidationError("schedule needs at least one step")
        for k, p in enumerate(probs):
            if not 0.0 <= p <= 1.0:
                raise ValidationError(f"p[{k}] = {p} outside [0, 1]")
        object.__setattr__(self, "probabilities", probs)

    def __len__(self):
        return len(self.probabilities)

    def __iter__(self):
        return iter(self.probabilities)

    def __getitem__(self, k):
        return self.probabilities[k]

    def as_array(self) -> np.ndarray:
        return np.array(self.probabilities)

    @classmethod
    def constant(cls, p: float, num_steps: int) -> "StepSchedule":
        return cls((p,) * num_steps)


def as_schedule(schedule) -> StepSchedule:
    return schedule if isinstance(schedule, StepSchedule) else StepSchedule(tuple(schedule))


def _check_angle(theta):
    theta = np.asarray(theta, dtype=float)
    if np.any(theta < 0) or np.any(theta > math.pi):
        raise ValidationError("scattering angle must lie in [0, pi]")
    return theta


def scattered_energy(energy, theta, constants: PhysicsConstants = WATER):
    """Compton-scattered photon energy in MeV."""
    if np.any(np.asarray(energy) <= 0):
        raise ValidationError("photon energy must be positive")
    theta = _check_angle(theta)
    out = energy / (1.0 + energy / constants.electron_rest_energy * (1.0 - np.cos(theta)))
    return float(out) if np.ndim(out) == 0 else out


def compton_differential(energy, theta, constants: PhysicsConstants = WATER):
    """Klein-Nishina dsigma/dOmega in cm^2/sr."""
    ratio = scattered_energy(energy, theta, constants) / energy
    theta = np.asarray(theta, dtype=float)
    re2 = constants.classical_electron_radius ** 2
    out = 0.5 * re2 * ratio ** 2 * (ratio + 1.0 / ratio - np.sin(theta) ** 2)
    return float(out) if np.ndim(out) == 0 else out


@functools.lru_cache(maxsize=8)
def _gauss_legendre(n: int):
    nodes, weights = np.polynomial.legendre.leggauss(n)
    # map [-1, 1] onto [0, pi]
    return 0.5 * math.pi * (nodes + 1.0), 0.5 * math.pi * weights


def _integrate(energy, constants, n):
    theta, w = _gauss_legendre(n)
    integrand = compton_differential(energy, theta, constants) * 2.0 * math.pi * np.sin(theta)
    return float(np.dot(w, integrand))


def compton_total(energy: float, constants: PhysicsConstants = WATER,
                  nodes: int = QUADRATURE_NODES, rtol: float = 1e-9) -> float:
    """Total Compton cross section in cm^2 by Gauss-Legendre quadrature over angle.

    The result is compared against the same rule at half the node count; a
    relative disagreement above ``rtol`` raises :class:`QuadratureError`.
    """
    if not energy > 0:
        raise ValidationError("photon energy must be positive")
    fine = _integrate(energy, constants, nodes)
    coarse = _integrate(energy, constants, nodes // 2)
    rel = abs(fine - coarse) / abs(fine)
    if not np.isfinite(fine) or rel > rtol:
        raise QuadratureError(
            f"quadrature at E={energy} MeV not converged: {nodes} nodes -> {fine:.12e}, "
            f"{nodes // 2} nodes -> {coarse:.12e} (rel diff {rel:.2e} > {rtol:.1e})")
    return fine


def klein_nishina_total(energy: float, constants: PhysicsConstants = WATER) -> float:
    """Closed-form Klein-Nishina total cross section in cm^2.

    Used as the independent check on :func:`compton_total`.  Below
    ``kappa = 1e-3`` the series expansion around the Thomson limit is used to
    avoid cancellation.
    """
    if not energy > 0:
        raise ValidationError("photon energy must be positive")
    k = energy / constants.electron_rest_energy
    re2 = constants.classical_electron_radius ** 2
    if k < 1e-3:
        thomson = 8.0 * math.pi / 3.0 * re2
        return thomson * (1.0 - 2.0 * k + 26.0 / 5.0 * k ** 2 - 133.0 / 10.0 * k ** 3)
    log = math.log1p(2.0 * k)
    bracket = ((1.0 + k) / k ** 2 * (2.0 * (1.0 + k) / (1.0 + 2.0 * k) - log / k)
               + log / (2.0 * k) - (1.0 + 3.0 * k) / (1.0 + 2.0 * k) ** 2)
    return 2.0 * math.pi * re2 * bracket


def thomson_cross_section(constants: PhysicsConstants = WATER) -> float:
    return 8.0 * math.pi / 3.0 * constants.classical_electron_radius ** 2


def cross_section(channel: Channel, energy: float, constants: PhysicsConstants = WATER) -> float:
    if channel is Channel.COMPTON:
        return compton_total(energy, constants)
    raise NotImplementedError(f"{channel.value} cross section is not modelled")


def linear_attenuation(energy: float, constants: PhysicsConstants = WATER,
                       channels: Sequence[Channel] = (Channel.COMPTON,)) -> float:
    """Linear attenuation coefficient mu in 1/cm."""
    return constants.electron_density * sum(cross_section(c, energy, constants) for c in channels)


def step_probability(mu: float, dx: float) -> float:
    """Probability of at least one interaction over a segment of length ``dx``."""
    if mu < 0:
        raise ValidationError(f"attenuation coefficient must be >= 0, got {mu}")
    if not dx > 0:
        raise ValidationError(f"step length must be positive, got {dx}")
    return -math.expm1(-mu * dx)


def build_schedule(beam: PhotonBeam, constants: PhysicsConstants = WATER,
                   attenuation: Optional[Sequence[float]] = None) -> StepSchedule:
    """Per-step interaction probabilities for ``beam``.

    ``attenuation`` optionally gives one mu (1/cm) per step for a layered
    medium; by default every step uses mu of the homogeneous medium.
    """
    if attenuation is None:
        mu = linear_attenuation(beam.energy, constants)
        return StepSchedule.constant(step_probability(mu, beam.step_length), beam.num_steps)
    attenuation = list(attenuation)
    if len(attenuation) != beam.num_steps:
        raise ValidationError(
            f"attenuation override has {len(attenuation)} entries, beam has {beam.num_steps} steps")
    return StepSchedule(tuple(step_probability(mu, beam.step_length) for mu in attenuation))


def cumulative_survival(schedule) -> np.ndarray:
    """Survival probability after each step."""
    return np.cumprod(1.0 - as_schedule(schedule).as_array())
