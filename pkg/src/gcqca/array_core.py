"""Cell array descriptor, dense state vector, and two-cell gate application.

Basis convention: configuration (v_0, ..., v_{n-1}) maps to index
sum(v_i * 2**(n-1-i)), i.e. the leftmost cell is the most significant bit.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import backend
from .errors import (DimensionError, InvalidArraySize, NonUnitaryGate,
                     NormalizationError)

ATOL = 1e-12


@dataclass(frozen=True)
class ArrayDescriptor:
    """A 1D array of two-state cells, species alternating A (even) / B (odd)."""
    n_cells: int

    def __post_init__(self):
        if self.n_cells < 2:
            raise InvalidArraySize(f"need at least 2 cells, got {self.n_cells}")

    def species(self, i: int) -> str:
        return "A" if i % 2 == 0 else "B"

    @property
    def dim(self) -> int:
        return 1 << self.n_cells

    def bit(self, cell: int) -> int:
        """Bit position of a cell in the basis-index convention."""
        return self.n_cells - 1 - cell


class QuantumState:
    """Dense complex amplitude vector over all cell configurations."""

    __slots__ = ("descriptor", "amplitudes")

    def __init__(self, descriptor: ArrayDescriptor, amplitudes: np.ndarray):
        amplitudes = np.ascontiguousarray(amplitudes, dtype=np.complex128)
        if amplitudes.shape != (descriptor.dim,):
            raise DimensionError(
                f"expected {descriptor.dim} amplitudes, got {amplitudes.shape}")
        self.descriptor = descriptor
        self.amplitudes = amplitudes

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def copy(self) -> "QuantumState":
        return QuantumState(self.descriptor, self.amplitudes.copy())


def make_descriptor(n_cells: int) -> ArrayDescriptor:
    return ArrayDescriptor(n_cells)


def basis_index(descriptor: ArrayDescriptor, cell_values) -> int:
    if len(cell_values) != descriptor.n_cells:
        raise DimensionError(
            f"expected {descriptor.n_cells} cell values, got {len(cell_values)}")
    idx = 0
    for v in cell_values:
        idx = (idx << 1) | int(v)
    return idx


def basis_state(descriptor: ArrayDescriptor, cell_values) -> QuantumState:
    amps = np.zeros(descriptor.dim, dtype=np.complex128)
    amps[basis_index(descriptor, cell_values)] = 1.0
    return QuantumState(descriptor, amps)


def product_state(descriptor: ArrayDescriptor, per_cell_states) -> QuantumState:
    if len(per_cell_states) != descriptor.n_cells:
        raise DimensionError(
            f"expected {descriptor.n_cells} cell states, got {len(per_cell_states)}")
    amps = np.ones(1, dtype=np.complex128)
    for v in per_cell_states:
        v = np.asarray(v, dtype=np.complex128)
        if v.shape != (2,):
            raise DimensionError("per-cell states must be 2-vectors")
        if abs(np.linalg.norm(v) - 1.0) > ATOL:
            raise NormalizationError("per-cell state is not normalized")
        amps = np.kron(amps, v)
    return QuantumState(descriptor, amps)


def check_unitary(u: np.ndarray, atol: float = ATOL) -> None:
    u = np.asarray(u)
    d = u.shape[0]
    if u.shape != (d, d):
        raise DimensionError("gate matrix must be square")
    if not np.allclose(u.conj().T @ u, np.eye(d), atol=atol):
        raise NonUnitaryGate("matrix is not unitary within tolerance")


def apply_pair_unitary(state: QuantumState, i: int, j: int,
                       u4: np.ndarray) -> QuantumState:
    """Apply u4 to cells (i, j) in place; v_i is the more significant gate bit."""
    n = state.descriptor.n_cells
    if i == j:
        raise IndexError("cells must be distinct")
    if not (0 <= i < n and 0 <= j < n):
        raise IndexError("cell index out of range")
    u4 = np.ascontiguousarray(u4, dtype=np.complex128)
    if u4.shape != (4, 4):
        raise DimensionError("pair gate must be 4x4")
    check_unitary(u4)
    backend.apply_pair_inplace(state.amplitudes, n,
                               state.descriptor.bit(i), state.descriptor.bit(j), u4)
    return state


def fidelity(s1: QuantumState, s2: QuantumState) -> float:
    if s1.descriptor.n_cells != s2.descriptor.n_cells:
        raise DimensionError("states live on different arrays")
    return float(abs(np.vdot(s1.amplitudes, s2.amplitudes)) ** 2)
