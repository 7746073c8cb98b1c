"""End-to-end acceptance checks.

Nine criteria covering compiled-gate fidelity, the collective-step oracle,
transport and spectator laws, reversal, kernel synthesis, and layout
density.  Each test prints a single summary line; run with `pytest -s` to
see them all.
"""
import itertools
import time

import numpy as np
import pytest

from gcqca.array_core import ArrayDescriptor, QuantumState
from gcqca.circuit import CU2, U1, CircuitIR
from gcqca.collective import (GateId, Orientation, Phase, PulseStep,
                              apply_collective, cnot, ctrl_h, ctrl_u, ctrl_y,
                              gate_matrix, phase_pairs, reverse_steps,
                              swap_gate)
from gcqca.compiler import compile
from gcqca.errors import KernelNotFound
from gcqca.layout import (Layout, build_layout, track_step, validate_layout)
from gcqca.synthesizer import (KernelSpec, default_alphabet,
                               swap_only_alphabet, synthesize, verify_kernel)
from gcqca.verifier import (logical_unitary, phase_fidelity,
                            reference_unitary, run_program)

X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.diag([1.0, -1.0]).astype(complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
T = np.diag([1.0, np.exp(1j * np.pi / 4)])

FIDELITY_MIN = 1.0 - 1e-9
LEAKAGE_MAX = 1e-10


def _report(num: int, label: str, ok: bool) -> None:
    print(f"\ncriterion {num} ({label}): {'PASS' if ok else 'FAIL'}")
    assert ok


def _compiled_fidelity(circuit, layout):
    program = compile(circuit, layout)
    extraction = logical_unitary(program)
    fidelity = phase_fidelity(extraction.u_logical,
                              reference_unitary(circuit))
    return fidelity, extraction.leakage


def _random_state(descriptor, rng) -> QuantumState:
    amps = (rng.normal(size=descriptor.dim)
            + 1j * rng.normal(size=descriptor.dim))
    amps /= np.linalg.norm(amps)
    return QuantumState(descriptor, amps.astype(np.complex128))


def test_criterion_1_single_qubit_universality():
    ok = True
    for k in (1, 2):
        _, layout = build_layout(k, margin=6)
        assert layout.descriptor.n_cells <= 17
        for q in range(k):
            for u in (X, H, T):
                t0 = time.monotonic()
                fid, leak = _compiled_fidelity(
                    CircuitIR(k, (U1(q, u),)), layout)
                elapsed = time.monotonic() - t0
                ok &= (fid >= FIDELITY_MIN and leak <= LEAKAGE_MAX
                       and elapsed < 5.0)
    _report(1, "single-qubit universality", ok)


def test_criterion_2_two_qubit_gates():
    ok = True
    _, lay2 = build_layout(2, margin=6)
    for (qc, qt), u in itertools.product(((0, 1), (1, 0)), (X, Z)):
        fid, leak = _compiled_fidelity(CircuitIR(2, (CU2(qc, qt, u),)), lay2)
        ok &= fid >= FIDELITY_MIN and leak <= LEAKAGE_MAX

    # k=3: garbage from the copy drifts opposite the CU during the carrier
    # transport, so the non-adjacent pair wants extra room on the left
    _, lay3 = build_layout(3, margin=8, right_margin=4)
    assert lay3.descriptor.n_cells <= 23
    for (qc, qt), u in itertools.product(((0, 1), (0, 2)), (X, Z)):
        t0 = time.monotonic()
        fid, leak = _compiled_fidelity(CircuitIR(3, (CU2(qc, qt, u),)), lay3)
        elapsed = time.monotonic() - t0
        ok &= (fid >= FIDELITY_MIN and leak <= LEAKAGE_MAX
               and elapsed < 120.0)
    _report(2, "two-qubit gates", ok)


def test_criterion_3_composite_circuit():
    _, layout = build_layout(2, margin=6)
    circuit = CircuitIR(2, (U1(0, H), CU2(0, 1, X), U1(0, H)))
    fid, leak = _compiled_fidelity(circuit, layout)
    # CNOT conjugated by H on its target equals CZ; cross-check the
    # reference products against each other
    cz = reference_unitary(CircuitIR(2, (CU2(0, 1, Z),)))
    conjugated = CircuitIR(2, (U1(1, H), CU2(0, 1, X), U1(1, H)))
    cross = phase_fidelity(reference_unitary(conjugated), cz)
    _report(3, "composite circuit", fid >= FIDELITY_MIN
            and leak <= LEAKAGE_MAX and cross >= FIDELITY_MIN)


def _step_oracle(step: PulseStep, n: int) -> np.ndarray:
    """Brute-force Kronecker-product unitary of one collective step."""
    desc = ArrayDescriptor(n)
    starts = {left: right for left, right in phase_pairs(desc, step.phase)}
    u = np.array([[1.0]], dtype=complex)
    c = 0
    while c < n:
        if c in starts:
            u = np.kron(u, gate_matrix(step.gate))
            c = starts[c] + 1
        else:
            u = np.kron(u, np.eye(2))
            c += 1
    return u


def test_criterion_4_oracle_equivalence():
    rng = np.random.default_rng(41)
    gates = [swap_gate(), cnot(Orientation.CTRL_LEFT),
             cnot(Orientation.CTRL_RIGHT), ctrl_h(Orientation.CTRL_LEFT),
             ctrl_h(Orientation.CTRL_RIGHT), ctrl_y(Orientation.CTRL_LEFT),
             ctrl_y(Orientation.CTRL_RIGHT)]
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(2, 7))
        desc = ArrayDescriptor(n)
        step = PulseStep(rng.choice([Phase.ALPHA, Phase.BETA]),
                         gates[int(rng.integers(len(gates)))])
        state = _random_state(desc, rng)
        expected = _step_oracle(step, n) @ state.amplitudes
        got = apply_collective(state, step).amplitudes
        worst = max(worst, float(np.max(np.abs(got - expected))))
    _report(4, "collective-step oracle equivalence", worst <= 1e-12)


def test_criterion_5_transport_law():
    rng = np.random.default_rng(42)
    swap = swap_gate()
    ok = True
    for _ in range(50):
        n = int(rng.integers(4, 13))
        desc = ArrayDescriptor(n)
        n_occ = int(rng.integers(1, n // 2 + 1))
        cells = sorted(rng.choice(n, size=n_occ, replace=False).tolist())
        positions = {f"o{i}": c for i, c in enumerate(cells)}
        x = sum(1 << desc.bit(c) for c in cells)
        # every SWAP-only sequence of length 8 (prefixes cover length <= 8)
        for word in range(1 << 8):
            amps = np.zeros(desc.dim, dtype=np.complex128)
            amps[x] = 1.0
            state = QuantumState(desc, amps)
            pos = dict(positions)
            for j in range(8):
                phase = Phase.ALPHA if (word >> j) & 1 else Phase.BETA
                step = PulseStep(phase, swap)
                state = apply_collective(state, step)
                pos = track_step(pos, step, desc)
                y = int(np.argmax(np.abs(state.amplitudes)))
                occupied = {c for c in range(n) if (y >> desc.bit(c)) & 1}
                if occupied != set(pos.values()):
                    ok = False
    _report(5, "transport law matches position tracking", ok)


def test_criterion_6_spectator_invariance():
    rng = np.random.default_rng(43)
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(2, 11))
        desc = ArrayDescriptor(n)
        orientation = (Orientation.CTRL_LEFT if rng.integers(2)
                       else Orientation.CTRL_RIGHT)
        kind = int(rng.integers(4))
        if kind == 0:
            gate = cnot(orientation)
        elif kind == 1:
            gate = ctrl_h(orientation)
        elif kind == 2:
            gate = ctrl_y(orientation)
        else:
            m = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
            q, _ = np.linalg.qr(m)
            gate = ctrl_u(q, orientation)
        step = PulseStep(rng.choice([Phase.ALPHA, Phase.BETA]), gate)
        # zero out every basis state with any active control cell set
        ctrl_bits = 0
        for left, right in phase_pairs(desc, step.phase):
            c = left if orientation is Orientation.CTRL_LEFT else right
            ctrl_bits |= 1 << desc.bit(c)
        amps = (rng.normal(size=desc.dim) + 1j * rng.normal(size=desc.dim))
        amps[(np.arange(desc.dim) & ctrl_bits) != 0] = 0.0
        amps /= np.linalg.norm(amps)
        state = QuantumState(desc, amps.astype(np.complex128))
        before = state.amplitudes.copy()
        after = apply_collective(state, step).amplitudes
        worst = max(worst, float(np.max(np.abs(after - before))))
    _report(6, "spectator invariance", worst <= 1e-12)


def test_criterion_7_involution_and_reversal():
    ok = True
    for gate in default_alphabet():
        m = gate_matrix(gate)
        ok &= bool(np.max(np.abs(m @ m - np.eye(4))) <= 1e-12)

    rng = np.random.default_rng(44)
    _, layout = build_layout(2, margin=6)
    program = compile(CircuitIR(2, (U1(0, H), CU2(0, 1, X), U1(1, T))),
                      layout)
    desc = program.descriptor
    for _ in range(20):
        cut = int(rng.integers(1, len(program.steps) + 1))
        prefix = program.steps[:cut]
        state = _random_state(desc, rng)
        before = state.amplitudes.copy()
        for step in list(prefix) + reverse_steps(prefix):
            state = apply_collective(state, step)
        fid = abs(np.vdot(before, state.amplitudes))
        ok &= fid >= 1.0 - 1e-10
    _report(7, "involution and reversal", ok)


def test_criterion_8_kernel_synthesis():
    spec = KernelSpec(window_size=10, max_len=12)
    t0 = time.monotonic()
    seq = synthesize(spec)
    elapsed = time.monotonic() - t0
    report = verify_kernel(seq, spec)
    ok = report.passed and elapsed < 600.0

    with pytest.raises(KernelNotFound):
        synthesize(KernelSpec(window_size=10, max_len=6,
                              alphabet=swap_only_alphabet()))
    with pytest.raises(KernelNotFound):
        synthesize(KernelSpec(window_size=10, max_len=1))

    # naive copy: one collective CNOT controlled on the qubit track copies
    # the control value, but duplicates every other qubit onto its
    # neighbour too, so it is no identity on single-qubit windows
    naive = [PulseStep(Phase.ALPHA, cnot(Orientation.CTRL_LEFT))]
    ok &= not verify_kernel(naive, spec).r2
    _report(8, "kernel synthesis", ok)


def test_criterion_9_layout_density():
    _, layout = build_layout(10, margin=6)
    cells = sorted(layout.qubit_cell.values())
    avg = (cells[-1] - cells[0]) / (len(cells) - 1)
    ok = abs(avg - 5.0) <= 0.5
    ok &= validate_layout(layout) == []

    desc = ArrayDescriptor(24)
    # a qubit with fewer than 3 blanks on one side must be rejected
    tight = Layout(desc, {0: 6, 1: 8}, 5, 6, 6)
    ok &= any("PaddingViolation" in v for v in validate_layout(tight))
    # and so must one with fewer than 5 blanks on both sides
    cramped = Layout(desc, {0: 6, 1: 10, 2: 14}, 5, 6, 6)
    ok &= any("PaddingViolation" in v and "qubit 1" in v
              for v in validate_layout(cramped))
    _report(9, "layout density and padding", ok)
