"""Lowering of logical circuits to global pulse programs.

Transport moves the CU (and, oppositely, every qubit) by collective SWAPs.
A single-qubit gate is transport followed by one collective CTRL_U with the
control on the CU's side.  A controlled two-qubit gate is

    P | G | reverse(P),   P = transport-to-control | copy-kernel
                              | transport-to-target

where the kernel moves the control qubit's value onto the CU cell, G is one
collective CTRL_U controlled by that carrier, and the reversal undoes all
disturbance, leaving only the intended gate.

Parity bookkeeping: qubits sit on even cells and the CU on an odd cell at
every routine boundary, and transports use an even number of SWAP steps so
those parities survive.  Under that constraint the side of a qubit the CU
can reach is fixed by their separation mod 4.  Kernel variants are kept
per (arrival side, close side): transports preserve all qubit-qubit
distances, so while a control qubit is copied its nearest neighbour sits
four cells away inside the kernel window, on the side set by the layout's
asymmetric working room, and the kernel must be exactly transparent to it.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .array_core import ArrayDescriptor
from .circuit import U1, CircuitIR
from .collective import (GateId, Orientation, Phase, PulseStep, ctrl_u,
                         phase_pairs, reverse_steps, swap_gate)
from .errors import KernelUnavailable, LayoutInvalid, MarginExceeded
from .layout import CU, Layout, qubit_key, validate_layout

_SWAP = swap_gate()


@dataclass
class PulseProgram:
    """Compiled pulse sequence plus the bookkeeping to audit and trace it.

    position_log[i] holds tracked occupant positions before step i (so the
    log is one longer than the step list).  Inside kernel step ranges the
    control qubit's entry is nominal: its value rides on the carrier and
    the window holds garbage until uncomputation.
    """
    descriptor: ArrayDescriptor
    layout: Layout
    steps: list[PulseStep]
    final_positions: dict[str, int]
    position_log: list[dict[str, int]] = field(default_factory=list)
    annotations: list[tuple[int, int, int]] = field(default_factory=list)
    # (instruction index, start step, end step), half-open step ranges
    kernel_ranges: list[tuple[int, int]] = field(default_factory=list)
    kernel_digest: str = ""


def _swap_move(cell: int, phase: Phase, n: int) -> int:
    """Destination of a basis occupant at `cell` under a collective SWAP."""
    if phase is Phase.ALPHA:
        dest = cell + 1 if cell % 2 == 0 else cell - 1
    else:
        dest = cell - 1 if cell % 2 == 0 else cell + 1
    if not 0 <= dest < n:
        return cell   # boundary cell has no partner this phase, stays put
    return dest


def _phase_moving(cell: int, direction: int) -> Phase:
    """SWAP phase that moves an occupant at `cell` by `direction` (+-1)."""
    if direction > 0:
        return Phase.ALPHA if cell % 2 == 0 else Phase.BETA
    return Phase.BETA if cell % 2 == 0 else Phase.ALPHA


def reachable_side(separation: int) -> int:
    """Final adjacency side (+1: mover ends right of target) after an
    even-length transport, for signed separation mover - target.

    Each SWAP step changes the gap by exactly 2, so the number of net
    toward-steps is fixed; when it is odd the mover must cross through the
    target to keep the step count even, flipping the side."""
    if separation % 2 == 0:
        raise LayoutInvalid("occupants must sit on opposite sublattices")
    gap = abs(separation)
    same_side = ((gap - 1) // 2) % 2 == 0
    start = 1 if separation > 0 else -1
    return start if same_side else -start


def transport(positions: dict[str, int], mover: str, target: str,
              descriptor: ArrayDescriptor) -> tuple[list[PulseStep], dict[str, int]]:
    """SWAP-only steps leaving `mover` next to `target`, step count even.

    Greedy: every step moves the mover toward the target.  When the
    toward-count alone would be odd, one extra step crosses the mover
    through the target (the adjacent SWAP exchanges them), which keeps the
    count even and puts the mover on the far side.  Raises MarginExceeded
    if any tracked occupant would be left without a swap partner at the
    array edge.
    """
    n = descriptor.n_cells
    pos = dict(positions)
    steps: list[PulseStep] = []
    gap = abs(pos[mover] - pos[target])
    m = (gap - 1) // 2
    n_steps = m if m % 2 == 0 else m + 1
    for _ in range(n_steps):
        direction = 1 if pos[target] > pos[mover] else -1
        ph = _phase_moving(pos[mover], direction)
        nxt = {name: _swap_move(c, ph, n) for name, c in pos.items()}
        stuck = sorted(name for name, c in pos.items() if nxt[name] == c)
        if stuck:
            raise MarginExceeded(
                f"transport would idle {', '.join(stuck)} at the array edge")
        steps.append(PulseStep(ph, _SWAP))
        pos = nxt
    assert abs(pos[mover] - pos[target]) == 1 and len(steps) % 2 == 0
    return steps, pos


def _gate_between(positions, control_name, target_name, u) -> PulseStep:
    """One collective CTRL_U acting on the adjacent (control, target) pair."""
    cc, tc = positions[control_name], positions[target_name]
    if abs(cc - tc) != 1:
        raise LayoutInvalid("control and target are not adjacent")
    lo = min(cc, tc)
    phase = Phase.ALPHA if lo % 2 == 0 else Phase.BETA
    orientation = (Orientation.CTRL_LEFT if cc == lo
                   else Orientation.CTRL_RIGHT)
    return PulseStep(phase, ctrl_u(u, orientation))


@dataclass(frozen=True)
class KernelInfo:
    """A verified copy kernel plus the geometry needed to splice it.

    Steps are window-relative; window cell w acts on array cell
    w + (qubit_cell - y_cell).  That offset stays even, so window phases
    and array phases coincide and steps splice in unchanged.  `side` is
    cu_cell - y_cell, the CU adjacency this variant consumes; `close_side`
    is the side on which the variant tolerates a neighbouring qubit four
    cells from Y (on the other side neighbours must be six cells away).
    `garbage_cells` lists the window cells, beyond the carrier and Y's
    nominal cell, still occupied when the copy finishes; they hold copy
    by-products until uncomputation and ride transports like any other
    occupant.
    """
    steps: tuple
    window_size: int
    y_cell: int
    cu_cell: int
    carrier_cell: int
    close_side: int = -1
    garbage_cells: tuple = ()
    digest: str = ""

    @property
    def side(self) -> int:
        return self.cu_cell - self.y_cell


def _splice_kernel(kernel: KernelInfo, positions, q_name,
                   descriptor) -> tuple[list[PulseStep], dict[str, int]]:
    """Kernel bookkeeping: the CU marker moves to the carrier cell.

    The kernel's steps are global pulses; its analysis window is only a
    frame, so what must exist in the array is the working room around the
    control qubit (three blanks on the close side, five on the far side),
    which a validated layout guarantees except at the array edge.
    """
    offset = positions[q_name] - kernel.y_cell
    if offset % 2 != 0:
        raise LayoutInvalid("kernel window must sit at an even offset")
    q = positions[q_name]
    lo = q - (3 if kernel.close_side < 0 else 5)
    hi = q + (5 if kernel.close_side < 0 else 3)
    if lo < 0 or hi >= descriptor.n_cells:
        raise MarginExceeded(
            f"kernel working room [{lo}, {hi}] leaves the array")
    pos = dict(positions)
    pos[CU] = offset + kernel.carrier_cell
    # copy by-products occupy cells until uncomputation; tracking them as
    # virtual occupants makes later transports fail loudly at the array
    # edge instead of silently truncating them
    for i, c in enumerate(kernel.garbage_cells):
        pos[f"g{i}"] = offset + c
    return list(kernel.steps), pos


def compile_single_qubit(positions: dict[str, int], q: int, u: np.ndarray,
                         descriptor: ArrayDescriptor
                         ) -> tuple[list[PulseStep], list[dict[str, int]]]:
    """Transport the CU next to qubit q, then one collective CTRL_U.

    Returns (steps, position log); log[i] is positions before step i and
    the last entry is the final positions (qubit drift retained).
    """
    log = [dict(positions)]
    steps, pos = transport(positions, CU, qubit_key(q), descriptor)
    for step in steps:
        nxt = {name: _swap_move(c, step.phase, descriptor.n_cells)
               for name, c in log[-1].items()}
        log.append(nxt)
    steps.append(_gate_between(pos, CU, qubit_key(q), u))
    log.append(dict(pos))
    return steps, log


def compile_two_qubit(positions: dict[str, int], q_c: int, q_t: int,
                      u: np.ndarray, descriptor: ArrayDescriptor,
                      kernels: dict[tuple[int, int], KernelInfo]
                      ) -> tuple[list[PulseStep], list[dict[str, int]],
                                 tuple[int, int]]:
    """P | G | reverse(P) realizing controlled-u; positions restored.

    `kernels` maps (CU arrival side, close side) to a verified kernel: the
    arrival side is forced by transport parity, and the variant must keep
    its guarantees with the control qubit's nearest neighbour four cells
    away on the close side.  Returns (steps, position log, kernel step
    range); the mirrored kernel range inside reverse(P) is implied by
    symmetry.
    """
    log = [dict(positions)]

    def run_swaps(swap_steps):
        for step in swap_steps:
            log.append({name: _swap_move(c, step.phase, descriptor.n_cells)
                        for name, c in log[-1].items()})

    steps, pos = transport(dict(positions), CU, qubit_key(q_c), descriptor)
    run_swaps(steps)
    side = pos[CU] - pos[qubit_key(q_c)]
    qc_cell = pos[qubit_key(q_c)]
    close = 0
    for name, c in pos.items():
        if name != CU and abs(c - qc_cell) == 4:
            close = 1 if c > qc_cell else -1
            break
    if close:
        kernel = kernels.get((side, close))
    else:   # neighbours six or more cells away suit either variant
        kernel = kernels.get((side, -1)) or kernels.get((side, 1))
    if kernel is None:
        raise KernelUnavailable(
            f"no copy kernel for CU arriving on side {side:+d} with the "
            f"nearest neighbour on side {close:+d}")
    k_start = len(steps)
    k_steps, pos = _splice_kernel(kernel, pos, qubit_key(q_c), descriptor)
    steps.extend(k_steps)
    log.extend([dict(log[-1])] * (len(k_steps) - 1))
    log.append(dict(pos))
    k_end = len(steps)
    t_steps, pos = transport(pos, CU, qubit_key(q_t), descriptor)
    steps.extend(t_steps)
    run_swaps(t_steps)
    gate = _gate_between(pos, CU, qubit_key(q_t), u)
    prefix = list(steps)
    fwd_log = list(log)
    steps.append(gate)
    log.append(dict(pos))
    steps.extend(reverse_steps(prefix))
    log.extend(dict(p) for p in reversed(fwd_log))
    assert log[-1] == dict(positions), "two-qubit routine must restore positions"
    return steps, log, (k_start, k_end)


def compile(circuit: CircuitIR, layout: Layout,
            kernels: dict[tuple[int, int], KernelInfo] | None = None
            ) -> PulseProgram:
    """Lower a circuit to a pulse program with continuous position tracking.

    `kernels` may be omitted: the packaged defaults are loaded on demand
    the first time a two-qubit instruction appears.
    """
    problems = validate_layout(layout)
    if problems:
        raise LayoutInvalid("; ".join(problems))
    descriptor = layout.descriptor
    positions = layout.positions()
    steps: list[PulseStep] = []
    log: list[dict[str, int]] = [dict(positions)]
    annotations: list[tuple[int, int, int]] = []
    kernel_ranges: list[tuple[int, int]] = []
    digest = ""

    for index, ins in enumerate(circuit.instructions):
        start = len(steps)
        try:
            if isinstance(ins, U1):
                part, part_log = compile_single_qubit(
                    positions, ins.q, ins.u, descriptor)
            else:
                if kernels is None:
                    from .synthesizer import default_kernels
                    kernels = default_kernels()
                part, part_log, (k_lo, k_hi) = compile_two_qubit(
                    positions, ins.q_control, ins.q_target, ins.u,
                    descriptor, kernels)
                kernel_ranges.append((start + k_lo, start + k_hi))
                span = len(part)
                kernel_ranges.append((start + span - k_hi, start + span - k_lo))
                if not digest and kernels:
                    digest = next(iter(sorted(kernels.items())))[1].digest
        except MarginExceeded as exc:
            raise MarginExceeded(
                f"instruction {index}: {exc}", instruction=index) from None
        steps.extend(part)
        positions = part_log[-1]
        log.extend(part_log[1:])
        annotations.append((index, start, len(steps)))

    return PulseProgram(descriptor, layout, steps, positions, log,
                        annotations, kernel_ranges, digest)


def check_well_formed(program: PulseProgram) -> list[str]:
    """Static control-side audit against tracked positions.

    Outside kernel ranges, no controlled-gate step may have a logical
    qubit on the control side of any active pair.  Kernel steps are
    exempt: their spectator safety is the verified identity property of
    the kernel, not a positional one.
    """
    problems = []
    in_kernel = set()
    for lo, hi in program.kernel_ranges:
        in_kernel.update(range(lo, hi))
    for i, step in enumerate(program.steps):
        gid = step.gate.gate_id
        if i in in_kernel or gid in (GateId.SWAP, GateId.NAND):
            continue
        positions = program.position_log[i]
        qcells = {c for name, c in positions.items()
                  if name.startswith("q")}
        for left, right in phase_pairs(program.descriptor, step.phase):
            ctrl = (left if step.gate.orientation is Orientation.CTRL_LEFT
                    else right)
            if ctrl in qcells:
                problems.append(
                    f"step {i}: logical qubit on control cell {ctrl}")
    return problems
