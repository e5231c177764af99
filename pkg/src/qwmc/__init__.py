"""Photon transport through water as a quantum walk, estimated with IQAE.

Modules: :mod:`statevector` (dense simulator), :mod:`physics` (Compton
attenuation), :mod:`walk` (walk circuits), :mod:`estimation` (Grover operator
and IQAE), :mod:`baseline` (classical reference and metrics), :mod:`cli`.
"""
from .errors import (CapacityError, CircuitIntegrityError, NonConvergenceError, QuadratureError,
                     QwmcError, ValidationError)
from .estimation import IqaeConfig, IqaeResult, exact_amplitude, grover_operator, iqae
from .physics import WATER, PhotonBeam, StepSchedule, build_schedule, compton_total
from .walk import DepthDistribution, RegisterLayout, build_walk, extract_distribution

__version__ = "0.1.0"

__all__ = [
    "CapacityError", "CircuitIntegrityError", "NonConvergenceError", "QuadratureError",
    "QwmcError", "ValidationError",
    "IqaeConfig", "IqaeResult", "exact_amplitude", "grover_operator", "iqae",
    "WATER", "PhotonBeam", "StepSchedule", "build_schedule", "compton_total",
    "DepthDistribution", "RegisterLayout", "build_walk", "extract_distribution",
]
