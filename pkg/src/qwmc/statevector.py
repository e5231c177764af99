"""Dense statevector simulation.

Bit ordering: qubit 0 is the least-significant bit of a basis-state index, so
basis index ``i`` has qubit ``q`` in state ``(i >> q) & 1``.  Bitstring keys in
:class:`ShotRecord` put qubit ``n - 1`` first and qubit 0 last.

Gates are applied in place on a ``(2,) * n`` tensor view of the amplitude
vector.  Tensor axis ``n - 1 - q`` belongs to qubit ``q``.
"""
from __future__ import annotations

import enum
import functools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Optional, Sequence, Union

import numpy as np

from .errors import CapacityError, ValidationError

HARD_MAX_QUBITS = 30
DEFAULT_MAX_QUBITS = 26
NORM_TOL = 1e-12

Predicate = Callable[[np.ndarray], np.ndarray]
ControlSpec = Union[Sequence[int], Mapping[int, int], None]


class GateKind(enum.Enum):
    RY = "ry"
    X = "x"
    MCX = "mcx"
    MCRY = "mcry"
    INCREMENT = "increment"
    DECREMENT = "decrement"
    PHASE_FLIP = "phase_flip"


_SELF_INVERSE = {GateKind.X, GateKind.MCX, GateKind.PHASE_FLIP}


@dataclass(frozen=True)
class GateOp:
    """One operation in a circuit.

    ``controls`` holds ``(qubit, polarity)`` pairs; the op acts only on basis
    states where every control qubit equals its polarity.  For increment and
    decrement ops ``targets`` is the register, least-significant qubit first.
    Phase flips carry a vectorized ``predicate`` over basis indices instead of
    targets.
    """

    kind: GateKind
    targets: tuple = ()
    controls: tuple = ()
    angle: float = 0.0
    predicate: Optional[Predicate] = None

    def qubits(self) -> tuple:
        return tuple(self.targets) + tuple(q for q, _ in self.controls)

    def inverse(self) -> "GateOp":
        if self.kind in _SELF_INVERSE:
            return self
        if self.kind in (GateKind.RY, GateKind.MCRY):
            return GateOp(self.kind, self.targets, self.controls, -self.angle)
        if self.kind is GateKind.INCREMENT:
            return GateOp(GateKind.DECREMENT, self.targets, self.controls)
        return GateOp(GateKind.INCREMENT, self.targets, self.controls)

    def validate(self, num_qubits: int) -> None:
        qubits = self.qubits()
        for q in qubits:
            if not 0 <= q < num_qubits:
                raise ValidationError(
                    f"{self.kind.value}: qubit {q} outside register of {num_qubits}")
        if len(set(qubits)) != len(qubits):
            raise ValidationError(f"{self.kind.value}: targets and controls overlap")
        for _, v in self.controls:
            if v not in (0, 1):
                raise ValidationError(f"control polarity must be 0 or 1, got {v}")
        if self.kind is GateKind.PHASE_FLIP:
            if self.predicate is None:
                raise ValidationError("phase flip needs a predicate")
        elif not self.targets:
            raise ValidationError(f"{self.kind.value}: no target qubits")
        if self.kind in (GateKind.RY, GateKind.X, GateKind.MCX, GateKind.MCRY) \
                and len(self.targets) != 1:
            raise ValidationError(f"{self.kind.value} acts on exactly one target")


def _controls(controls: ControlSpec, polarity: Optional[Sequence[int]] = None) -> tuple:
    if controls is None:
        return ()
    if isinstance(controls, Mapping):
        return tuple((int(q), int(v)) for q, v in controls.items())
    controls = [int(q) for q in controls]
    if polarity is None:
        polarity = [1] * len(controls)
    if len(polarity) != len(controls):
        raise ValidationError("polarity list must match controls")
    return tuple(zip(controls, (int(v) for v in polarity)))


def ry(target: int, angle: float, controls: ControlSpec = None,
       polarity: Optional[Sequence[int]] = None) -> GateOp:
    """Y rotation ``[[cos(a/2), -sin(a/2)], [sin(a/2), cos(a/2)]]``, optionally controlled."""
    ctl = _controls(controls, polarity)
    kind = GateKind.MCRY if ctl else GateKind.RY
    return GateOp(kind, (int(target),), ctl, float(angle))


def x(target: int, controls: ControlSpec = None,
      polarity: Optional[Sequence[int]] = None) -> GateOp:
    ctl = _controls(controls, polarity)
    kind = GateKind.MCX if ctl else GateKind.X
    return GateOp(kind, (int(target),), ctl)


def mcx(controls: ControlSpec, target: int,
        polarity: Optional[Sequence[int]] = None) -> GateOp:
    return GateOp(GateKind.MCX, (int(target),), _controls(controls, polarity))


def increment(register: Sequence[int], controls: ControlSpec = None,
              polarity: Optional[Sequence[int]] = None) -> GateOp:
    """Add one (mod ``2**len(register)``) to the value held in ``register``."""
    return GateOp(GateKind.INCREMENT, tuple(int(q) for q in register),
                  _controls(controls, polarity))


def phase_flip(predicate: Predicate) -> GateOp:
    """Multiply by -1 every basis amplitude whose index satisfies ``predicate``."""
    return GateOp(GateKind.PHASE_FLIP, predicate=predicate)


# Basis-index predicates.  Frozen dataclasses so they hash by value and the
# phase-flip mask cache works across equal instances.

@dataclass(frozen=True)
class IsZero:
    def __call__(self, idx):
        return idx == 0


@dataclass(frozen=True)
class QubitEquals:
    qubit: int
    value: int = 1

    def __call__(self, idx):
        return ((idx >> self.qubit) & 1) == self.value


@dataclass(frozen=True)
class RegisterAtLeast:
    """Integer value of ``register`` (LSB first) is at least ``threshold``."""

    register: tuple
    threshold: int

    def __call__(self, idx):
        return register_value(idx, self.register) >= self.threshold


def register_value(idx: np.ndarray, register: Sequence[int]) -> np.ndarray:
    """Integer held in ``register`` for each basis index in ``idx``."""
    value = np.zeros_like(idx)
    for bit, q in enumerate(register):
        value |= ((idx >> q) & 1) << bit
    return value


@dataclass(frozen=True)
class Circuit:
    num_qubits: int
    ops: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "ops", tuple(self.ops))
        for op in self.ops:
            op.validate(self.num_qubits)

    def __len__(self):
        return len(self.ops)

    def __add__(self, other: "Circuit") -> "Circuit":
        if other.num_qubits != self.num_qubits:
            raise ValidationError("cannot concatenate circuits of different widths")
        return Circuit(self.num_qubits, self.ops + other.ops)

    def extended(self, ops: Iterable[GateOp]) -> "Circuit":
        return Circuit(self.num_qubits, self.ops + tuple(ops))

    def inverse(self) -> "Circuit":
        return inverse(self)


def inverse(circuit: Circuit) -> Circuit:
    """Reverse the op order and invert each op."""
    return Circuit(circuit.num_qubits, tuple(op.inverse() for op in reversed(circuit.ops)))


class QuantumState:
    """Normalized complex amplitude vector over ``2**num_qubits`` basis states."""

    __slots__ = ("num_qubits", "amplitudes")

    def __init__(self, amplitudes, *, normalize: bool = False):
        amps = np.array(amplitudes, dtype=np.complex128).ravel()
        n = int(amps.size).bit_length() - 1
        if amps.size < 2 or amps.size != 1 << n:
            raise ValidationError(f"amplitude vector length {amps.size} is not 2**n, n >= 1")
        norm = np.linalg.norm(amps)
        if normalize:
            if norm == 0:
                raise ValidationError("cannot normalize the zero vector")
            amps /= norm
        elif abs(norm ** 2 - 1.0) > 1e-10:
            raise ValidationError(f"amplitudes not normalized (norm^2 = {norm ** 2})")
        self.num_qubits = n
        self.amplitudes = amps

    def copy(self) -> "QuantumState":
        new = QuantumState.__new__(QuantumState)
        new.num_qubits = self.num_qubits
        new.amplitudes = self.amplitudes.copy()
        return new

    def norm_squared(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def probabilities(self) -> np.ndarray:
        return probabilities(self)

    def __repr__(self):
        return f"QuantumState(num_qubits={self.num_qubits})"


def new_zero_state(num_qubits: int, max_qubits: int = DEFAULT_MAX_QUBITS) -> QuantumState:
    """Return ``|0...0>``.  ``max_qubits`` may be raised up to 30."""
    if max_qubits > HARD_MAX_QUBITS:
        raise CapacityError(f"cap {max_qubits} exceeds hard limit {HARD_MAX_QUBITS}")
    if not 1 <= num_qubits <= max_qubits:
        raise CapacityError(f"num_qubits={num_qubits} outside [1, {max_qubits}]")
    amps = np.zeros(1 << num_qubits, dtype=np.complex128)
    amps[0] = 1.0
    state = QuantumState.__new__(QuantumState)
    state.num_qubits = num_qubits
    state.amplitudes = amps
    return state


def _index(n: int, controls: tuple) -> list:
    idx = [slice(None)] * n
    for q, v in controls:
        idx[n - 1 - q] = v
    return idx


@functools.lru_cache(maxsize=256)
def _predicate_mask(predicate, n: int) -> np.ndarray:
    mask = np.asarray(predicate(np.arange(1 << n, dtype=np.int64)), dtype=bool)
    if mask.shape != (1 << n,):
        raise ValidationError("predicate must return one boolean per basis index")
    return mask


def predicate_mask(predicate: Predicate, n: int) -> np.ndarray:
    """Boolean mask of basis indices satisfying ``predicate`` (cached when hashable)."""
    try:
        return _predicate_mask(predicate, n)
    except TypeError:
        return _predicate_mask.__wrapped__(predicate, n)


def apply_gate(state: QuantumState, op: GateOp) -> QuantumState:
    """Apply ``op`` to ``state`` in place and return it."""
    n = state.num_qubits
    op.validate(n)
    kind = op.kind
    if kind is GateKind.PHASE_FLIP:
        state.amplitudes[predicate_mask(op.predicate, n)] *= -1
        return state

    psi = state.amplitudes.reshape((2,) * n)
    idx = _index(n, op.controls)
    if kind in (GateKind.INCREMENT, GateKind.DECREMENT):
        _shift_register(psi, n, idx, op)
        return state

    axis = n - 1 - op.targets[0]
    idx[axis] = 0
    i0 = tuple(idx)
    idx[axis] = 1
    i1 = tuple(idx)
    if kind in (GateKind.X, GateKind.MCX):
        lo = psi[i0].copy()
        psi[i0] = psi[i1]
        psi[i1] = lo
    else:
        c, s = np.cos(op.angle / 2), np.sin(op.angle / 2)
        a, b = psi[i0], psi[i1]
        new0 = c * a - s * b
        new1 = s * a + c * b
        psi[i0] = new0
        psi[i1] = new1
    return state


def _shift_register(psi, n, idx, op):
    sub = psi[tuple(idx)]
    fixed = {n - 1 - q for q, _ in op.controls}
    remaining = [ax for ax in range(n) if ax not in fixed]
    # register axes most-significant first so the flattened index equals the value
    reg_axes = [remaining.index(n - 1 - q) for q in reversed(op.targets)]
    m = len(reg_axes)
    moved = np.moveaxis(sub, reg_axes, list(range(m)))
    shift = 1 if op.kind is GateKind.INCREMENT else -1
    flat = moved.reshape((1 << m, -1))
    moved[...] = np.roll(flat, shift, axis=0).reshape(moved.shape)


def apply_circuit(state: QuantumState, circuit: Circuit) -> QuantumState:
    if circuit.num_qubits != state.num_qubits:
        raise ValidationError(
            f"circuit width {circuit.num_qubits} != state width {state.num_qubits}")
    for op in circuit.ops:
        apply_gate(state, op)
    return state


def run(circuit: Circuit, max_qubits: int = DEFAULT_MAX_QUBITS) -> QuantumState:
    """Apply ``circuit`` to a fresh zero state."""
    return apply_circuit(new_zero_state(circuit.num_qubits, max_qubits), circuit)


def probabilities(state: QuantumState) -> np.ndarray:
    amps = state.amplitudes
    return amps.real ** 2 + amps.imag ** 2


def marginal_probability(state: QuantumState, predicate: Predicate) -> float:
    """Total probability of basis states satisfying ``predicate``."""
    mask = predicate_mask(predicate, state.num_qubits)
    return float(probabilities(state)[mask].sum())


@dataclass
class ShotRecord:
    counts: dict
    shots: int
    seed: Optional[int] = None
    indices: np.ndarray = field(default=None, repr=False, compare=False)

    def frequency(self, bits: str) -> float:
        return self.counts.get(bits, 0) / self.shots


def sample_indices(state: QuantumState, shots: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``shots`` basis indices by inverse CDF over the probability vector."""
    if shots < 1:
        raise ValidationError(f"shots must be >= 1, got {shots}")
    cdf = np.cumsum(probabilities(state))
    u = rng.random(shots) * cdf[-1]
    out = np.searchsorted(cdf, u, side="right")
    return np.minimum(out, cdf.size - 1)


def sample(state: QuantumState, shots: int, seed: int) -> ShotRecord:
    """Measure the full register ``shots`` times with a PCG64 generator seeded by ``seed``."""
    rng = np.random.default_rng(seed)
    idx = sample_indices(state, shots, rng)
    hist = np.bincount(idx, minlength=1 << state.num_qubits)
    n = state.num_qubits
    counts = {format(i, f"0{n}b"): int(c) for i, c in enumerate(hist) if c}
    return ShotRecord(counts=counts, shots=int(shots), seed=seed, indices=idx)
