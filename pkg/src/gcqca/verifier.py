"""Program execution, logical-unitary extraction, and reference comparison.

A compiled program is correct when the unitary it induces on the logical
qubits matches the circuit's reference unitary up to one global phase, and
no probability leaks outside the expected occupancy pattern (blanks 0, CU
cell 1, qubits anywhere in their computational basis).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .array_core import QuantumState
from .circuit import U1, CircuitIR
from .collective import _PERM_GATES, _step_permutation, apply_collective
from .compiler import PulseProgram
from .errors import DimensionError
from .layout import CU, qubit_key


@dataclass
class LogicalExtraction:
    u_logical: np.ndarray
    leakage: float


def run_program(program: PulseProgram, state: QuantumState) -> QuantumState:
    if state.descriptor != program.descriptor:
        raise DimensionError("state does not match the program's array size")
    for step in program.steps:
        state = apply_collective(state, step)
    return state


def _encode_index(descriptor, positions: dict[str, int], k: int,
                  logical: int) -> int:
    """Basis index: CU cell 1, qubit i holds bit i of `logical` (qubit 0
    most significant), all other cells 0."""
    x = 1 << descriptor.bit(positions[CU])
    for i in range(k):
        if (logical >> (k - 1 - i)) & 1:
            x |= 1 << descriptor.bit(positions[qubit_key(i)])
    return x


def _compose_segments(program: PulseProgram) -> list:
    """Fuse runs of generalized-permutation steps into single gathers.

    Most compiled steps are transports (collective SWAPs) or other index
    permutations times unit factors; a run of those composes into one
    (perm, factor) pair, applied to a state vector with a single gather
    instead of one per step.  Amplitude-mixing steps break the run and are
    kept as-is.  Returns a list of ("perm", perm, factor) and
    ("step", pulse_step) segments in program order.
    """
    n = program.descriptor.n_cells
    segments: list = []
    perm = None       # pending composed permutation (None = identity)
    factor = None     # pending composed factor (None = all ones)

    def flush():
        nonlocal perm, factor
        if perm is not None or factor is not None:
            segments.append(("perm", perm, factor))
        perm = factor = None

    for step in program.steps:
        gate = step.gate
        if gate.gate_id not in _PERM_GATES:
            flush()
            segments.append(("step", step))
            continue
        p, f = _step_permutation(n, step.phase, gate.gate_id,
                                 gate.orientation)
        # pending op C: a -> factor * a[perm]; new step S: a -> f * a[p].
        # S after C: a -> f * factor[p] * a[perm[p]]
        if p is not None:
            if perm is not None:
                perm = perm[p]
            else:
                perm = p.copy()
            if factor is not None:
                factor = factor[p]
        if f is not None:
            factor = np.asarray(f) if factor is None else factor * f
    flush()
    return segments


def _run_segments(segments, program: PulseProgram,
                  amps: np.ndarray) -> np.ndarray:
    descriptor = program.descriptor
    for seg in segments:
        if seg[0] == "perm":
            _, perm, factor = seg
            if perm is not None:
                amps = amps[perm]
            if factor is not None:
                amps = amps * factor
            amps = np.ascontiguousarray(amps, dtype=np.complex128)
        else:
            amps = apply_collective(QuantumState(descriptor, amps),
                                    seg[1]).amplitudes
    return amps


def logical_unitary(program: PulseProgram) -> LogicalExtraction:
    """Simulate all logical basis inputs and read off the induced unitary.

    Each input is encoded at the initial layout, run through the program,
    and projected onto the expected final occupancy (blanks 0, CU 1,
    qubits at their tracked final cells).  Leakage is the largest mass
    discarded by that projection over all inputs; it is reported, never
    silently renormalized.
    """
    descriptor = program.descriptor
    k = program.layout.k
    d = 1 << k
    initial = program.layout.positions()
    final = program.final_positions
    u = np.zeros((d, d), dtype=np.complex128)
    out_idx = np.array([_encode_index(descriptor, final, k, y)
                        for y in range(d)])
    segments = _compose_segments(program)
    leakage = 0.0
    for x in range(d):
        amps = np.zeros(descriptor.dim, dtype=np.complex128)
        amps[_encode_index(descriptor, initial, k, x)] = 1.0
        amps = _run_segments(segments, program, amps)
        col = amps[out_idx]
        leakage = max(leakage, 1.0 - float(np.linalg.norm(col) ** 2))
        u[:, x] = col
    return LogicalExtraction(u, leakage)


def _embed(u2: np.ndarray, q: int, k: int) -> np.ndarray:
    """u on qubit q (qubit 0 most significant) as a 2^k unitary."""
    m = np.array([[1.0]], dtype=np.complex128)
    for i in range(k):
        m = np.kron(m, u2 if i == q else np.eye(2))
    return m


def _embed_controlled(u2: np.ndarray, qc: int, qt: int, k: int) -> np.ndarray:
    d = 1 << k
    m = np.eye(d, dtype=np.complex128)
    bc, bt = k - 1 - qc, k - 1 - qt
    for x in range(d):
        if not (x >> bc) & 1 or (x >> bt) & 1:
            continue
        y = x | (1 << bt)
        m[x, x], m[x, y] = u2[0, 0], u2[0, 1]
        m[y, x], m[y, y] = u2[1, 0], u2[1, 1]
    return m


def reference_unitary(circuit: CircuitIR) -> np.ndarray:
    """Ordered product of the circuit's instructions as a 2^k matrix."""
    k = circuit.k
    u = np.eye(1 << k, dtype=np.complex128)
    for ins in circuit.instructions:
        if isinstance(ins, U1):
            m = _embed(ins.u, ins.q, k)
        else:
            m = _embed_controlled(ins.u, ins.q_control, ins.q_target, k)
        u = m @ u
    return u


def phase_fidelity(u: np.ndarray, v: np.ndarray) -> float:
    """|trace(u^H v)| / dim; 1 exactly when u and v differ by a global phase."""
    u = np.asarray(u)
    v = np.asarray(v)
    if u.shape != v.shape or u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise DimensionError("phase_fidelity needs equal square matrices")
    return float(abs(np.trace(u.conj().T @ v)) / u.shape[0])
