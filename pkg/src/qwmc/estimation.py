"""Grover operator and iterative (phase-estimation-free) amplitude estimation.

The good subspace is picked out by a basis-index predicate, normally
"position register >= x".  Those are the branches where the photon crossed
depth ``x`` without interacting, so ``a`` is the survival probability to that
depth.  No flag qubit is used.

Oracle queries are counted as ``2k + 1`` applications of ``A`` or ``A^dagger``
per shot of ``Q^k A |0>``.
"""
from __future__ import annotations

import logging
import math
import threading
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np

from . import statevector as sv
from .errors import NonConvergenceError, ValidationError
from .walk import WalkCircuit

logger = logging.getLogger(__name__)

StatePrep = Union[sv.Circuit, WalkCircuit]


def _circuit(A: StatePrep) -> sv.Circuit:
    return A.circuit if isinstance(A, WalkCircuit) else A


def survival_predicate(walk: WalkCircuit, threshold: Optional[int] = None) -> sv.RegisterAtLeast:
    """Good states: position register >= ``threshold`` (default: full survival)."""
    n = walk.num_steps
    threshold = n if threshold is None else int(threshold)
    if not 1 <= threshold <= n:
        raise ValidationError(f"threshold depth {threshold} outside [1, {n}]")
    return sv.RegisterAtLeast(walk.layout.position_qubits, threshold)


def grover_operator(A: StatePrep, good: sv.Predicate) -> sv.Circuit:
    """``Q = A S_0 A^dagger S_good``, with ``S_good`` applied first."""
    circ = _circuit(A)
    ops = [sv.phase_flip(good)]
    ops += sv.inverse(circ).ops
    ops.append(sv.phase_flip(sv.IsZero()))
    ops += circ.ops
    return sv.Circuit(circ.num_qubits, ops)


def exact_amplitude(A: StatePrep, good: sv.Predicate) -> float:
    return sv.marginal_probability(sv.run(_circuit(A)), good)


class GroverSampler:
    """Prepares ``Q^k A |0>`` on the statevector and samples the good marginal.

    States are advanced by applying ``Q`` one repetition at a time and cached
    by ``k``, so one sampler can be shared by many seeded runs (and threads)
    on the same problem.
    """

    def __init__(self, A: StatePrep, good: sv.Predicate):
        self.circuit = _circuit(A)
        self.good = good
        self.grover = grover_operator(self.circuit, good)
        self.mask = sv.predicate_mask(good, self.circuit.num_qubits)
        self._states = {0: sv.run(self.circuit)}
        self._lock = threading.Lock()

    def state(self, k: int) -> sv.QuantumState:
        if k < 0:
            raise ValidationError(f"Grover power must be >= 0, got {k}")
        with self._lock:
            return self._state(k)

    def _state(self, k: int) -> sv.QuantumState:
        if k not in self._states:
            base = max(j for j in self._states if j < k)
            st = self._states[base].copy()
            for _ in range(k - base):
                sv.apply_circuit(st, self.grover)
            self._states[k] = st
        return self._states[k]

    def good_probability(self, k: int) -> float:
        return float(sv.probabilities(self.state(k))[self.mask].sum())

    def measure(self, k: int, shots: int, rng: np.random.Generator) -> int:
        idx = sv.sample_indices(self.state(k), shots, rng)
        return int(self.mask[idx].sum())


def good_probability_after(A: StatePrep, good: sv.Predicate, k: int, shots: int,
                           seed: int) -> tuple:
    """Sample ``shots`` measurements of ``Q^k A |0>``; returns ``(good_count, shots)``."""
    count = GroverSampler(A, good).measure(k, shots, np.random.default_rng(seed))
    return count, shots


def chernoff_hoeffding_bound(epsilon: float, alpha: float) -> int:
    """Largest query count allowed by ``(6/eps) ln((2/alpha) ln(pi/(4 eps)))``."""
    _check_eps_alpha(epsilon, alpha)
    value = 6.0 / epsilon * math.log(2.0 / alpha * math.log(math.pi / (4.0 * epsilon)))
    return math.floor(value)


def _check_eps_alpha(epsilon, alpha):
    if not 0 < epsilon < 0.5:
        raise ValidationError(f"epsilon must lie in (0, 0.5), got {epsilon}")
    if not 0 < alpha < 1:
        raise ValidationError(f"alpha must lie in (0, 1), got {alpha}")


@dataclass(frozen=True)
class IqaeConfig:
    epsilon: float = 0.01
    alpha: float = 0.05
    shots_per_round: int = 30
    max_rounds: int = 1000
    # minimal ratio between successive scalings 4k + 2
    min_ratio: float = 1.5

    def __post_init__(self):
        _check_eps_alpha(self.epsilon, self.alpha)
        if self.shots_per_round < 1:
            raise ValidationError("shots_per_round must be >= 1")
        if self.max_rounds < 1:
            raise ValidationError("max_rounds must be >= 1")
        if self.min_ratio <= 1:
            raise ValidationError("min_ratio must exceed 1")

    @property
    def round_bound(self) -> int:
        """Upper bound on the number of distinct Grover powers, used in the union bound."""
        return max(1, math.ceil(math.log2(math.pi / (8.0 * self.epsilon))))

    @property
    def overshoot_scale(self) -> float:
        """Angle-width constant ``L_max`` of the no-overshooting rule."""
        x = 2.0 / self.shots_per_round * math.log(2.0 * self.round_bound / self.alpha)
        return math.asin(min(1.0, x)) ** 0.25

    def shots_for(self, k: int) -> int:
        """Shots for a round at power ``k``; fewer once ``4k + 2`` would overshoot epsilon."""
        scale = 4 * k + 2
        l_max = self.overshoot_scale
        if scale > math.ceil(l_max / self.epsilon):
            return math.ceil(self.shots_per_round * l_max / (self.epsilon * scale * 10))
        return self.shots_per_round

    def half_width(self, shots: int) -> float:
        return math.sqrt(math.log(2.0 * self.round_bound / self.alpha) / (2.0 * shots))


@dataclass
class IqaeResult:
    estimate: float
    interval: tuple
    oracle_queries: int
    rounds: list = field(default_factory=list)
    theta_interval: tuple = (0.0, math.pi / 2)
    epsilon: float = 0.0
    alpha: float = 0.0

    @property
    def half_width(self) -> float:
        return 0.5 * (self.interval[1] - self.interval[0])

    def to_dict(self) -> dict:
        return {
            "estimate": self.estimate,
            "interval": list(self.interval),
            "oracle_queries": self.oracle_queries,
            "epsilon": self.epsilon,
            "alpha": self.alpha,
            "theta_interval": list(self.theta_interval),
            "rounds": self.rounds,
        }


def find_next_k(k: int, upper: bool, theta_lo: float, theta_hi: float,
                min_ratio: float = 2.0) -> tuple:
    """Largest ``k' `` with ``K = 4k' + 2 >= min_ratio (4k + 2)`` whose scaled interval
    ``[K theta_lo, K theta_hi]`` (mod 2 pi) sits inside one half of the circle.

    Returns ``(k', upper_half)``; falls back to ``(k, upper)`` when nothing fits.
    """
    k_scale = 4 * k + 2
    width = theta_hi - theta_lo
    k_max = int(math.pi / width) if width > 0 else 1 << 40
    scale = k_max - (k_max - 2) % 4
    while scale >= min_ratio * k_scale:
        lo = scale * theta_lo / (2 * math.pi)
        hi = scale * theta_hi / (2 * math.pi)
        lo, hi = lo - math.floor(lo), hi - math.floor(hi)
        if lo <= hi <= 0.5:
            return (scale - 2) // 4, True
        if 0.5 <= lo <= hi:
            return (scale - 2) // 4, False
        scale -= 4
    return k, upper


def iterative_estimate(measure: Callable[[int, int], int], config: IqaeConfig = IqaeConfig()
                       ) -> IqaeResult:
    """Run IQAE against ``measure(k, shots) -> good_count``.

    Each round picks the Grover power with :func:`find_next_k`, builds a
    Chernoff-Hoeffding interval on ``sin^2((2k+1) theta)`` from all shots taken
    at that power, maps it back to ``theta`` on the known half circle, and
    intersects it with the running interval.  Stops once the interval on
    ``a = sin^2(theta)`` is at most ``2 epsilon`` wide.
    """
    eps = config.epsilon
    theta_lo, theta_hi = 0.0, math.pi / 2
    a_lo, a_hi = 0.0, 1.0
    k, upper = 0, True
    same_k_shots = same_k_good = 0
    queries = 0
    rounds = []

    while a_hi - a_lo > 2 * eps:
        if len(rounds) >= config.max_rounds:
            raise NonConvergenceError(
                f"no convergence after {config.max_rounds} rounds", (a_lo, a_hi), rounds)
        next_k, upper = find_next_k(k, upper, theta_lo, theta_hi, config.min_ratio)
        if next_k != k or not rounds:
            same_k_shots = same_k_good = 0
        k = next_k
        shots = config.shots_for(k)
        good = measure(k, shots)
        queries += shots * (2 * k + 1)
        same_k_shots += shots
        same_k_good += good

        freq = same_k_good / same_k_shots
        w = config.half_width(same_k_shots)
        p_lo, p_hi = max(0.0, freq - w), min(1.0, freq + w)
        scale = 4 * k + 2
        if upper:
            phi_lo, phi_hi = math.acos(1 - 2 * p_lo), math.acos(1 - 2 * p_hi)
        else:
            phi_lo = 2 * math.pi - math.acos(1 - 2 * p_hi)
            phi_hi = 2 * math.pi - math.acos(1 - 2 * p_lo)
        turns = math.floor(scale * theta_lo / (2 * math.pi))
        new_lo = (2 * math.pi * turns + phi_lo) / scale
        new_hi = (2 * math.pi * turns + phi_hi) / scale
        lo, hi = max(theta_lo, new_lo), min(theta_hi, new_hi)
        if lo > hi:
            # disjoint with the running interval: a previous bound failed, keep the newest
            lo, hi = new_lo, new_hi
        theta_lo, theta_hi = lo, hi
        a_lo, a_hi = math.sin(theta_lo) ** 2, math.sin(theta_hi) ** 2
        rounds.append({"k": k, "shots": shots, "good": good, "upper_half": upper,
                       "a_interval": [a_lo, a_hi]})
        logger.debug("round %d: k=%d good=%d/%d a in [%.6f, %.6f]",
                     len(rounds), k, good, shots, a_lo, a_hi)

    return IqaeResult(
        estimate=0.5 * (a_lo + a_hi),
        interval=(a_lo, a_hi),
        oracle_queries=queries,
        rounds=rounds,
        theta_interval=(theta_lo, theta_hi),
        epsilon=eps,
        alpha=config.alpha,
    )


def iqae(A: StatePrep, good: sv.Predicate, config: IqaeConfig = IqaeConfig(), seed: int = 0,
         sampler: Optional[GroverSampler] = None) -> IqaeResult:
    """Estimate the good-state probability of ``A |0>`` to half-width ``config.epsilon``."""
    sampler = sampler or GroverSampler(A, good)
    rng = np.random.default_rng(seed)
    return iterative_estimate(lambda k, n: sampler.measure(k, n, rng), config)
