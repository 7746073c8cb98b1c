"""Placement of logical qubits and the control unit on the cell array.

Qubits live on A (even) cells separated by alternating 3- and 5-blank gaps;
the CU starts on the B cell immediately left of qubit 0.  Occupant positions
are tracked through pulse steps as a plain map occupant-name -> cell.
"""
from __future__ import annotations

from dataclasses import dataclass

from .array_core import ArrayDescriptor
from .collective import GateId, Phase, PulseStep, phase_pairs
from .errors import ParityError

CU = "cu"


def qubit_key(i: int) -> str:
    return f"q{i}"


@dataclass(frozen=True)
class Layout:
    descriptor: ArrayDescriptor
    qubit_cell: dict[int, int]
    cu_cell: int
    left_margin: int
    right_margin: int

    @property
    def k(self) -> int:
        return len(self.qubit_cell)

    def positions(self) -> dict[str, int]:
        pos = {qubit_key(i): c for i, c in self.qubit_cell.items()}
        pos[CU] = self.cu_cell
        return pos


def build_layout(k: int, margin: int = 6, first_gap: int = 3,
                 right_margin: int | None = None
                 ) -> tuple[ArrayDescriptor, Layout]:
    """Standard layout: qubits on A cells with alternating gaps, CU on the
    B cell left of qubit 0.  Margins may differ per side: long carrier
    transports drift copy by-products opposite the CU, so circuits whose
    control qubits sit left of distant targets want more room on the left
    than on the right.
    """
    if k < 1:
        raise ValueError("need at least one qubit")
    if right_margin is None:
        right_margin = margin
    for m in (margin, right_margin):
        if m % 2 != 0:
            raise ParityError("margins must be even to keep qubits on A cells")
        if m < 2:
            raise ValueError("margins must be >= 2 (the CU starts left of "
                             "qubit 0 and every qubit needs edge room)")
    if first_gap not in (3, 5):
        raise ValueError("first_gap must be 3 or 5")

    gaps = (first_gap, 8 - first_gap)
    cells = [margin]
    for i in range(1, k):
        cells.append(cells[-1] + gaps[(i - 1) % 2] + 1)
    n_cells = cells[-1] + 1 + right_margin
    descriptor = ArrayDescriptor(n_cells)
    layout = Layout(descriptor, dict(enumerate(cells)), margin - 1,
                    margin, right_margin)
    return descriptor, layout


def validate_layout(layout: Layout, footprint: tuple[int, int] = (5, 3)) -> list[str]:
    """Check parity, occupancy and working-room rules; empty list means OK."""
    violations = []
    n = layout.descriptor.n_cells
    occupied = {}
    for i, c in layout.qubit_cell.items():
        if not 0 <= c < n:
            violations.append(f"RangeViolation: qubit {i} at cell {c}")
            continue
        if c % 2 != 0:
            violations.append(f"ParityViolation: qubit {i} on B cell {c}")
        if c in occupied:
            violations.append(
                f"OccupancyViolation: qubit {i} and {occupied[c]} share cell {c}")
        occupied[c] = f"qubit {i}"
    if not 0 <= layout.cu_cell < n:
        violations.append(f"RangeViolation: CU at cell {layout.cu_cell}")
    elif layout.cu_cell % 2 == 0:
        violations.append(f"ParityViolation: CU on A cell {layout.cu_cell}")
    if layout.cu_cell in occupied:
        violations.append(
            f"OccupancyViolation: CU and {occupied[layout.cu_cell]} "
            f"share cell {layout.cu_cell}")

    # working room counts cells to the nearest other qubit (or the array
    # edge); the CU does not block, it is the actor needing the room
    big, small = max(footprint), min(footprint)
    qcells = sorted(layout.qubit_cell.values())
    for i, c in layout.qubit_cell.items():
        lower = [q for q in qcells if q < c]
        upper = [q for q in qcells if q > c]
        room_l = c - lower[-1] - 1 if lower else c
        room_r = upper[0] - c - 1 if upper else n - 1 - c
        if not ((room_l >= big and room_r >= small)
                or (room_l >= small and room_r >= big)):
            violations.append(
                f"PaddingViolation: qubit {i} has {room_l}/{room_r} blanks, "
                f"needs {big} on one side and {small} on the other")
    return violations


def track_step(positions: dict[str, int], step: PulseStep,
               descriptor: ArrayDescriptor) -> dict[str, int]:
    """Advance occupant positions through one pulse step.

    Only collective SWAP moves occupants; controlled gates and NAND leave
    basis-valued occupancy in place.
    """
    if step.gate.gate_id is not GateId.SWAP:
        return dict(positions)
    partner = {}
    for left, right in phase_pairs(descriptor, step.phase):
        partner[left] = right
        partner[right] = left
    return {name: partner.get(c, c) for name, c in positions.items()}


def track_program(positions: dict[str, int], steps,
                  descriptor: ArrayDescriptor) -> dict[str, int]:
    for step in steps:
        positions = track_step(positions, step, descriptor)
    return positions
