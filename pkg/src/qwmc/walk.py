"""Absorb-or-advance photon transport as a discrete-time quantum walk.

Register layout for an ``N``-step walk: ``m = ceil(log2(N + 1))`` position
qubits (0 .. m-1, LSB first), then one coin qubit, then one workspace qubit.
Coin ``|0>`` means no interaction, ``|1>`` means the photon was absorbed.

Step ``k`` is four ops:

1. flip the workspace if position == k (multi-controlled X, polarity = bits of k)
2. rotate the coin by ``Ry(2 arcsin sqrt(p_k))`` controlled on workspace = 1
3. repeat 1 to return the workspace to ``|0>``
4. increment the position register controlled on coin = 0

An absorbed branch sits at a depth j < k with coin = 1, so later position
checks never match it and one coin qubit is enough without resets.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import statevector as sv
from .errors import CircuitIntegrityError, ValidationError
from .physics import StepSchedule, as_schedule

STRAY_MASS_TOL = 1e-12


@dataclass(frozen=True)
class RegisterLayout:
    position_qubits: tuple
    coin_qubit: int
    workspace_qubit: int

    def __post_init__(self):
        qubits = list(self.position_qubits) + [self.coin_qubit, self.workspace_qubit]
        if len(set(qubits)) != len(qubits):
            raise ValidationError("register roles must use disjoint qubits")

    @property
    def total_qubits(self) -> int:
        return len(self.position_qubits) + 2

    @property
    def capacity(self) -> int:
        """Largest position value the register holds."""
        return (1 << len(self.position_qubits)) - 1

    @classmethod
    def for_steps(cls, num_steps: int) -> "RegisterLayout":
        if num_steps < 1:
            raise ValidationError(f"walk needs at least one step, got {num_steps}")
        m = max(1, math.ceil(math.log2(num_steps + 1)))
        return cls(tuple(range(m)), m, m + 1)


@dataclass(frozen=True)
class WalkCircuit:
    circuit: sv.Circuit
    layout: RegisterLayout
    schedule: StepSchedule

    @property
    def num_steps(self) -> int:
        return len(self.schedule)


@dataclass
class DepthDistribution:
    """Probability of absorption at each depth ``0 .. N-1`` plus survival."""

    absorbed: np.ndarray
    survived: float

    def __post_init__(self):
        self.absorbed = np.asarray(self.absorbed, dtype=float)
        self.survived = float(self.survived)

    @property
    def num_steps(self) -> int:
        return self.absorbed.size

    def as_array(self) -> np.ndarray:
        return np.append(self.absorbed, self.survived)

    def labels(self) -> list:
        return outcome_labels(self.num_steps)

    def total(self) -> float:
        return float(self.absorbed.sum() + self.survived)


def outcome_labels(num_steps: int) -> list:
    return [f"absorbed@{k}" for k in range(num_steps)] + ["survived"]


def coin_angle(p: float) -> float:
    """Ry angle whose matrix has cos = sqrt(1 - p) and sin = sqrt(p)."""
    if not 0.0 <= p <= 1.0:
        raise ValidationError(f"interaction probability {p} outside [0, 1]")
    return 2.0 * math.asin(math.sqrt(p))


def _position_check(k: int, layout: RegisterLayout) -> sv.GateOp:
    polarity = [(k >> bit) & 1 for bit in range(len(layout.position_qubits))]
    return sv.mcx(layout.position_qubits, layout.workspace_qubit, polarity)


def step_ops(k: int, p: float, layout: RegisterLayout) -> list:
    if k < 0 or k > layout.capacity:
        raise ValidationError(
            f"step {k} overflows a {len(layout.position_qubits)}-qubit position register")
    check = _position_check(k, layout)
    return [
        check,
        sv.ry(layout.coin_qubit, coin_angle(p), controls=[layout.workspace_qubit]),
        check,
        sv.increment(layout.position_qubits, controls=[layout.coin_qubit], polarity=[0]),
    ]


def build_step(k: int, p: float, layout: RegisterLayout) -> sv.Circuit:
    return sv.Circuit(layout.total_qubits, step_ops(k, p, layout))


def build_walk(schedule, layout: Optional[RegisterLayout] = None) -> WalkCircuit:
    """State-preparation circuit for the whole chain."""
    schedule = as_schedule(schedule)
    n = len(schedule)
    if layout is None:
        layout = RegisterLayout.for_steps(n)
    if n > layout.capacity:
        raise ValidationError(
            f"{n} steps need positions 0..{n}, register holds 0..{layout.capacity}")
    ops = []
    for k, p in enumerate(schedule):
        ops.extend(step_ops(k, p, layout))
    return WalkCircuit(sv.Circuit(layout.total_qubits, ops), layout, schedule)


def extract_distribution(state: sv.QuantumState, layout: RegisterLayout,
                         num_steps: int) -> DepthDistribution:
    """Decode a post-walk state into absorption depths and survival.

    Raises :class:`CircuitIntegrityError` when more than 1e-12 of the
    probability sits outside the patterns a clean walk can produce.
    """
    if num_steps < 1:
        raise ValidationError("num_steps must be >= 1")
    if state.num_qubits != layout.total_qubits:
        raise ValidationError("state width does not match layout")
    probs = sv.probabilities(state)
    idx = np.arange(probs.size)
    pos = sv.register_value(idx, layout.position_qubits)
    coin = (idx >> layout.coin_qubit) & 1
    work = (idx >> layout.workspace_qubit) & 1
    clean = work == 0
    absorbed_mask = clean & (coin == 1) & (pos < num_steps)
    absorbed = np.bincount(pos[absorbed_mask], weights=probs[absorbed_mask], minlength=num_steps)
    survived_mask = clean & (coin == 0) & (pos == num_steps)
    survived = probs[survived_mask].sum()
    stray = probs[~(absorbed_mask | survived_mask)].sum()
    if stray >= STRAY_MASS_TOL:
        raise CircuitIntegrityError(f"{stray:.3e} probability outside walk outcome patterns")
    return DepthDistribution(absorbed[:num_steps], survived)


def walk_distribution(walk: WalkCircuit) -> DepthDistribution:
    """Run ``walk`` on the zero state and decode it."""
    return extract_distribution(sv.run(walk.circuit), walk.layout, walk.num_steps)


def circuit_depth(circuit: sv.Circuit) -> int:
    """ASAP layer count treating every op as one layer on the qubits it touches."""
    front = [0] * circuit.num_qubits
    for op in circuit.ops:
        qubits = op.qubits() if op.kind is not sv.GateKind.PHASE_FLIP else range(circuit.num_qubits)
        layer = max(front[q] for q in qubits) + 1
        for q in qubits:
            front[q] = layer
    return max(front, default=0)


def qubit_report(layout: RegisterLayout, schedule, channels: int = 2) -> dict:
    """Resource counts of this construction next to the ``K + 2 log2(N+1)`` estimate."""
    schedule = as_schedule(schedule)
    walk = build_walk(schedule, layout)
    n = len(schedule)
    return {
        "steps": n,
        "position_qubits": len(layout.position_qubits),
        "coin_qubits": 1,
        "workspace_qubits": 1,
        "qubits": layout.total_qubits,
        "gate_count": len(walk.circuit),
        "depth": circuit_depth(walk.circuit),
        "reference_qubits": channels + 2 * math.ceil(math.log2(n + 1)),
    }


def sampled_distribution(state: sv.QuantumState, layout: RegisterLayout, num_steps: int,
                         shots: int, rng: np.random.Generator) -> DepthDistribution:
    """Measure ``shots`` times and decode the outcome frequencies."""
    idx = sv.sample_indices(state, shots, rng)
    pos = sv.register_value(idx, layout.position_qubits)
    coin = (idx >> layout.coin_qubit) & 1
    work = (idx >> layout.workspace_qubit) & 1
    absorbed = (work == 0) & (coin == 1) & (pos < num_steps)
    survived = (work == 0) & (coin == 0) & (pos == num_steps)
    if not np.all(absorbed | survived):
        raise CircuitIntegrityError("measured a basis state outside the walk outcome patterns")
    hist = np.bincount(pos[absorbed], minlength=num_steps)[:num_steps]
    return DepthDistribution(hist / shots, np.count_nonzero(survived) / shots)
