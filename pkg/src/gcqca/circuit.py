"""Logical circuit IR and its text format.

One instruction per line, '#' starts a comment:

    H q | X q | Y q | Z q | S q | T q
    U1 q re00 im00 re01 im01 re10 im10 re11 im11
    CNOT qc qt | CZ qa qb
    CU qc qt re00 im00 re01 im01 re10 im10 re11 im11
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .array_core import check_unitary
from .collective import H2, X2, Y2, Z2
from .errors import NonUnitaryGate, ParseError

S2 = np.diag([1, 1j]).astype(np.complex128)
T2 = np.diag([1, np.exp(1j * np.pi / 4)]).astype(np.complex128)

NAMED_1Q = {"H": H2, "X": X2, "Y": Y2, "Z": Z2, "S": S2, "T": T2}
NAMED_2Q = {"CNOT": X2, "CZ": Z2}


@dataclass(frozen=True, eq=False)
class U1:
    q: int
    u: np.ndarray


@dataclass(frozen=True, eq=False)
class CU2:
    q_control: int
    q_target: int
    u: np.ndarray


@dataclass(frozen=True, eq=False)
class CircuitIR:
    k: int
    instructions: tuple

    def __post_init__(self):
        for ins in self.instructions:
            if isinstance(ins, U1):
                qs = (ins.q,)
            else:
                if ins.q_control == ins.q_target:
                    raise ValueError("control and target must differ")
                qs = (ins.q_control, ins.q_target)
            for q in qs:
                if not 0 <= q < self.k:
                    raise ValueError(f"qubit index {q} out of range for k={self.k}")
            check_unitary(np.asarray(ins.u))


def _parse_matrix(fields, lineno) -> np.ndarray:
    if len(fields) != 8:
        raise ParseError(f"expected 8 floats for a 2x2 unitary, got {len(fields)}",
                         lineno)
    try:
        vals = [float(f) for f in fields]
    except ValueError as exc:
        raise ParseError(f"bad float: {exc}", lineno) from None
    u = np.array([[vals[0] + 1j * vals[1], vals[2] + 1j * vals[3]],
                  [vals[4] + 1j * vals[5], vals[6] + 1j * vals[7]]])
    try:
        check_unitary(u)
    except NonUnitaryGate:
        raise ParseError("matrix is not unitary", lineno) from None
    return u


def _parse_qubit(field, k, lineno) -> int:
    try:
        q = int(field)
    except ValueError:
        raise ParseError(f"bad qubit index {field!r}", lineno) from None
    if not 0 <= q < k:
        raise ParseError(f"qubit index out of range: {q} (k={k})", lineno)
    return q


def parse_circuit(text: str, k: int) -> CircuitIR:
    instructions = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        mnem, args = fields[0].upper(), fields[1:]
        if mnem in NAMED_1Q:
            if len(args) != 1:
                raise ParseError(f"{mnem} takes one qubit argument", lineno)
            instructions.append(U1(_parse_qubit(args[0], k, lineno), NAMED_1Q[mnem]))
        elif mnem in NAMED_2Q:
            if len(args) != 2:
                raise ParseError(f"{mnem} takes two qubit arguments", lineno)
            qc = _parse_qubit(args[0], k, lineno)
            qt = _parse_qubit(args[1], k, lineno)
            if qc == qt:
                raise ParseError("control and target must differ", lineno)
            instructions.append(CU2(qc, qt, NAMED_2Q[mnem]))
        elif mnem == "U1":
            if len(args) != 9:
                raise ParseError("U1 takes a qubit and 8 floats", lineno)
            q = _parse_qubit(args[0], k, lineno)
            instructions.append(U1(q, _parse_matrix(args[1:], lineno)))
        elif mnem == "CU":
            if len(args) != 10:
                raise ParseError("CU takes two qubits and 8 floats", lineno)
            qc = _parse_qubit(args[0], k, lineno)
            qt = _parse_qubit(args[1], k, lineno)
            if qc == qt:
                raise ParseError("control and target must differ", lineno)
            instructions.append(CU2(qc, qt, _parse_matrix(args[2:], lineno)))
        else:
            raise ParseError(f"unknown mnemonic {mnem!r}", lineno)
    return CircuitIR(k, tuple(instructions))
