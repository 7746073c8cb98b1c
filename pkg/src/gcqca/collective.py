"""Interaction phases, the collective gate alphabet, and global pulse steps.

A pulse step applies one two-cell gate simultaneously to every pair of the
active phase.  SWAP, CNOT, CTRL_Y and NAND permute (and phase) basis states,
so whole steps with those gates are applied as a single index gather; only
CTRL_H and generic CTRL_U need amplitude mixing, which goes through the
pair-gate backend.
"""
from __future__ import annotations

import enum
import functools
from dataclasses import dataclass, field

import numpy as np

from . import backend
from .array_core import ArrayDescriptor, QuantumState, check_unitary
from .errors import MissingParameter, NonInvertibleInAlphabet

SQ2 = 1.0 / np.sqrt(2.0)
H2 = np.array([[SQ2, SQ2], [SQ2, -SQ2]], dtype=np.complex128)
X2 = np.array([[0, 1], [1, 0]], dtype=np.complex128)
Y2 = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
Z2 = np.array([[1, 0], [0, -1]], dtype=np.complex128)


class Phase(enum.Enum):
    ALPHA = "ALPHA"
    BETA = "BETA"


class GateId(enum.Enum):
    SWAP = "SWAP"
    CNOT = "CNOT"
    CTRL_H = "CTRL_H"
    CTRL_Y = "CTRL_Y"
    NAND = "NAND"
    CTRL_U = "CTRL_U"


class Orientation(enum.Enum):
    CTRL_LEFT = "L"
    CTRL_RIGHT = "R"
    SYMMETRIC = "S"


_SYMMETRIC_IDS = (GateId.SWAP, GateId.NAND)


@dataclass(frozen=True, eq=False)
class CollectiveGate:
    gate_id: GateId
    orientation: Orientation = Orientation.SYMMETRIC
    u: np.ndarray | None = field(default=None)

    def __post_init__(self):
        if self.gate_id in _SYMMETRIC_IDS:
            if self.orientation is not Orientation.SYMMETRIC:
                raise ValueError(f"{self.gate_id.value} is symmetric")
        elif self.orientation is Orientation.SYMMETRIC:
            raise ValueError(f"{self.gate_id.value} needs an orientation")
        if self.gate_id is GateId.CTRL_U:
            if self.u is None:
                raise MissingParameter("CTRL_U requires a 2x2 unitary parameter")
            u = np.ascontiguousarray(self.u, dtype=np.complex128)
            check_unitary(u)
            object.__setattr__(self, "u", u)
        elif self.u is not None:
            raise ValueError(f"{self.gate_id.value} takes no parameter")

    def inverse(self) -> "CollectiveGate":
        if self.gate_id is GateId.CTRL_U:
            return CollectiveGate(GateId.CTRL_U, self.orientation, self.u.conj().T)
        # every parameterless alphabet gate is an involution
        return self

    def __repr__(self):
        if self.gate_id is GateId.CTRL_U:
            return f"CollectiveGate(CTRL_U, {self.orientation.value}, u={self.u.tolist()})"
        return f"CollectiveGate({self.gate_id.value}, {self.orientation.value})"


def swap_gate() -> CollectiveGate:
    return CollectiveGate(GateId.SWAP)


def nand_gate() -> CollectiveGate:
    return CollectiveGate(GateId.NAND)


def cnot(orientation: Orientation) -> CollectiveGate:
    return CollectiveGate(GateId.CNOT, orientation)


def ctrl_h(orientation: Orientation) -> CollectiveGate:
    return CollectiveGate(GateId.CTRL_H, orientation)


def ctrl_y(orientation: Orientation) -> CollectiveGate:
    return CollectiveGate(GateId.CTRL_Y, orientation)


def ctrl_u(u: np.ndarray, orientation: Orientation) -> CollectiveGate:
    return CollectiveGate(GateId.CTRL_U, orientation, np.asarray(u))


@dataclass(frozen=True, eq=False)
class PulseStep:
    phase: Phase
    gate: CollectiveGate

    def inverse(self) -> "PulseStep":
        return PulseStep(self.phase, self.gate.inverse())

    def __repr__(self):
        return f"PulseStep({self.phase.value}, {self.gate!r})"


def phase_pairs(descriptor: ArrayDescriptor, phase: Phase) -> list[tuple[int, int]]:
    """Disjoint (left, right) cell pairs coupled in the given phase."""
    n = descriptor.n_cells
    start = 0 if phase is Phase.ALPHA else 1
    return [(i, i + 1) for i in range(start, n - 1, 2)]


def _controlled(u2: np.ndarray, orientation: Orientation) -> np.ndarray:
    m = np.eye(4, dtype=np.complex128)
    if orientation is Orientation.CTRL_LEFT:
        m[2:4, 2:4] = u2
    else:  # control on the right cell: rows/cols 1 (01) and 3 (11)
        m[np.ix_([1, 3], [1, 3])] = u2
    return m


def gate_matrix(gate: CollectiveGate) -> np.ndarray:
    """4x4 matrix over the ordered basis |left right> in {00,01,10,11}."""
    gid = gate.gate_id
    if gid is GateId.SWAP:
        m = np.eye(4, dtype=np.complex128)[[0, 2, 1, 3]]
    elif gid is GateId.NAND:
        m = np.diag([1, 1, 1, -1]).astype(np.complex128)
    elif gid is GateId.CNOT:
        m = _controlled(X2, gate.orientation)
    elif gid is GateId.CTRL_H:
        m = _controlled(H2, gate.orientation)
    elif gid is GateId.CTRL_Y:
        m = _controlled(Y2, gate.orientation)
    else:
        m = _controlled(gate.u, gate.orientation)
    return m


def _pair_bits(n: int, pairs, orientation: Orientation):
    """(control, target) bit positions per pair for an oriented gate."""
    out = []
    for left, right in pairs:
        bl, br = n - 1 - left, n - 1 - right
        if orientation is Orientation.CTRL_LEFT:
            out.append((bl, br))
        else:
            out.append((br, bl))
    return out


@functools.lru_cache(maxsize=12)
def _step_permutation(n: int, phase: Phase, gate_id: GateId,
                      orientation: Orientation):
    """(perm, factor) arrays realizing a generalized-permutation step.

    new_amps = factor * old_amps[perm]; either entry may be None.  perm is
    stored as int32 and factor in the narrowest exact dtype to keep the
    cache small at large n.
    """
    pairs = phase_pairs(ArrayDescriptor(n), phase)
    idx = np.arange(1 << n, dtype=np.int64)
    if gate_id is GateId.SWAP:
        perm = idx.copy()
        for left, right in pairs:
            bl, br = n - 1 - left, n - 1 - right
            x = ((perm >> bl) ^ (perm >> br)) & 1
            perm ^= (x << bl) | (x << br)
        return perm.astype(np.int32), None
    if gate_id is GateId.NAND:
        par = np.zeros(1 << n, dtype=np.int64)
        for left, right in pairs:
            bl, br = n - 1 - left, n - 1 - right
            par ^= (idx >> bl) & (idx >> br) & 1
        return None, (1 - 2 * par).astype(np.int8)
    if gate_id is GateId.CNOT:
        perm = idx.copy()
        for bc, bt in _pair_bits(n, pairs, orientation):
            perm = perm ^ (((idx >> bc) & 1) << bt)
        return perm.astype(np.int32), None
    if gate_id is GateId.CTRL_Y:
        perm = idx.copy()
        p = np.zeros(1 << n, dtype=np.int64)   # controls set
        q = np.zeros(1 << n, dtype=np.int64)   # controls set with new target 1
        for bc, bt in _pair_bits(n, pairs, orientation):
            c = (idx >> bc) & 1
            perm = perm ^ (c << bt)
            p += c
            q += c & ((idx >> bt) & 1)
        # <t_new|sigma_y|t_old> = i for 0->1, -i for 1->0, per active pair
        tab = np.array([1, -1j, -1, 1j], dtype=np.complex64)
        factor = ((1 - 2 * (q & 1)).astype(np.complex64)) * tab[p & 3]
        return perm.astype(np.int32), factor
    raise ValueError(f"no permutation path for {gate_id}")


_PERM_GATES = (GateId.SWAP, GateId.NAND, GateId.CNOT, GateId.CTRL_Y)


def apply_collective(state: QuantumState, step: PulseStep) -> QuantumState:
    """Apply one global pulse step to the whole array."""
    desc = state.descriptor
    gate = step.gate
    if gate.gate_id in _PERM_GATES:
        perm, factor = _step_permutation(desc.n_cells, step.phase,
                                         gate.gate_id, gate.orientation)
        amps = state.amplitudes
        if perm is not None:
            amps = amps[perm]
        if factor is not None:
            amps = amps * factor
        state.amplitudes = np.ascontiguousarray(amps, dtype=np.complex128)
        return state
    m4 = gate_matrix(gate)
    check_unitary(m4)
    for left, right in phase_pairs(desc, step.phase):
        backend.apply_pair_inplace(state.amplitudes, desc.n_cells,
                                   desc.bit(left), desc.bit(right), m4)
    return state


def reverse_steps(steps) -> list[PulseStep]:
    """Inverse program: reversed order, each gate replaced by its inverse."""
    out = []
    for step in reversed(list(steps)):
        if not isinstance(step.gate.gate_id, GateId):
            raise NonInvertibleInAlphabet(str(step.gate.gate_id))
        out.append(step.inverse())
    return out
