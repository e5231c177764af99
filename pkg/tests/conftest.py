import math

import numpy as np
import pytest
from hypothesis import settings

from qwmc import statevector as sv

# acceptance verdict lines, echoed in the terminal summary
ACCEPTANCE_LINES = []

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


def dense_matrix(op: sv.GateOp, n: int) -> np.ndarray:
    """Explicit 2^n x 2^n matrix of ``op``, built column by column from index arithmetic."""
    dim = 1 << n
    m = np.zeros((dim, dim), dtype=complex)
    for col in range(dim):
        bits = [(col >> q) & 1 for q in range(n)]
        if op.kind is sv.GateKind.PHASE_FLIP:
            m[col, col] = -1.0 if op.predicate(np.array([col]))[0] else 1.0
            continue
        if not all(bits[q] == v for q, v in op.controls):
            m[col, col] = 1.0
            continue
        if op.kind in (sv.GateKind.X, sv.GateKind.MCX):
            m[col ^ (1 << op.targets[0]), col] = 1.0
        elif op.kind in (sv.GateKind.RY, sv.GateKind.MCRY):
            t = op.targets[0]
            c, s = math.cos(op.angle / 2), math.sin(op.angle / 2)
            col0, col1 = col & ~(1 << t), col | (1 << t)
            if bits[t] == 0:
                m[col0, col] += c
                m[col1, col] += s
            else:
                m[col0, col] += -s
                m[col1, col] += c
        else:
            reg = op.targets
            value = sum(bits[q] << i for i, q in enumerate(reg))
            step = 1 if op.kind is sv.GateKind.INCREMENT else -1
            new = (value + step) % (1 << len(reg))
            row = col
            for i, q in enumerate(reg):
                row = (row & ~(1 << q)) | (((new >> i) & 1) << q)
            m[row, col] = 1.0
    return m


def random_op(rng: np.random.Generator, n: int) -> sv.GateOp:
    """A random op of any kind on ``n`` qubits."""
    qubits = list(rng.permutation(n))
    kind = rng.integers(6)
    if kind == 0:
        return sv.ry(int(qubits[0]), rng.uniform(-2 * np.pi, 2 * np.pi))
    if kind == 1:
        return sv.x(int(qubits[0]))
    if kind == 2 and n >= 2:
        nc = int(rng.integers(1, n))
        return sv.mcx([int(q) for q in qubits[1:1 + nc]], int(qubits[0]),
                      [int(b) for b in rng.integers(0, 2, nc)])
    if kind == 3 and n >= 2:
        nc = int(rng.integers(1, n))
        return sv.ry(int(qubits[0]), rng.uniform(-np.pi, np.pi),
                     [int(q) for q in qubits[1:1 + nc]], [int(b) for b in rng.integers(0, 2, nc)])
    if kind == 4:
        m = int(rng.integers(1, n + 1))
        nc = int(rng.integers(0, n - m + 1))
        ctl = [int(q) for q in qubits[m:m + nc]]
        op = sv.increment([int(q) for q in qubits[:m]], ctl or None,
                          [int(b) for b in rng.integers(0, 2, nc)] if ctl else None)
        return op if rng.random() < 0.5 else op.inverse()
    threshold = int(rng.integers(0, 1 << n))
    return sv.phase_flip(sv.RegisterAtLeast(tuple(range(n)), threshold))


def random_state(rng: np.random.Generator, n: int) -> sv.QuantumState:
    v = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return sv.QuantumState(v, normalize=True)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
