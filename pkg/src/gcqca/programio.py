"""Text serialization for pulse steps, kernel files and pulse-program files.

Step lines are `ALPHA|BETA GATEID [L|R] [8 floats]`; floats use 17
significant digits so programs round-trip bit exactly.  '#' starts a
comment anywhere.
"""
from __future__ import annotations

import hashlib

import numpy as np

from .collective import (CollectiveGate, GateId, Orientation, Phase,
                         PulseStep)
from .errors import ParseError


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def format_step(step: PulseStep) -> str:
    gate = step.gate
    parts = [step.phase.value, gate.gate_id.value]
    if gate.orientation is not Orientation.SYMMETRIC:
        parts.append(gate.orientation.value)
    if gate.gate_id is GateId.CTRL_U:
        for row in gate.u:
            for z in row:
                parts.append(_fmt(z.real))
                parts.append(_fmt(z.imag))
    return " ".join(parts)


def parse_step(line: str, lineno: int | None = None) -> PulseStep:
    fields = line.split()
    if len(fields) < 2:
        raise ParseError(f"malformed step line {line!r}", lineno)
    try:
        phase = Phase(fields[0])
    except ValueError:
        raise ParseError(f"unknown phase {fields[0]!r}", lineno) from None
    try:
        gate_id = GateId(fields[1])
    except ValueError:
        raise ParseError(f"unknown gate {fields[1]!r}", lineno) from None
    rest = fields[2:]
    if gate_id in (GateId.SWAP, GateId.NAND):
        if rest:
            raise ParseError(f"{gate_id.value} takes no arguments", lineno)
        return PulseStep(phase, CollectiveGate(gate_id))
    if not rest or rest[0] not in ("L", "R"):
        raise ParseError(f"{gate_id.value} needs an orientation L|R", lineno)
    orientation = Orientation(rest[0])
    rest = rest[1:]
    if gate_id is GateId.CTRL_U:
        if len(rest) != 8:
            raise ParseError("CTRL_U needs 8 floats", lineno)
        try:
            v = [float(f) for f in rest]
        except ValueError as exc:
            raise ParseError(f"bad float: {exc}", lineno) from None
        u = np.array([[v[0] + 1j * v[1], v[2] + 1j * v[3]],
                      [v[4] + 1j * v[5], v[6] + 1j * v[7]]])
        return PulseStep(phase, CollectiveGate(gate_id, orientation, u))
    if rest:
        raise ParseError(f"{gate_id.value} takes no matrix", lineno)
    return PulseStep(phase, CollectiveGate(gate_id, orientation))


def steps_digest(steps) -> str:
    h = hashlib.sha256()
    for step in steps:
        h.update(format_step(step).encode())
        h.update(b"\n")
    return h.hexdigest()[:16]


# ---------------------------------------------------------------- kernels

def write_kernel_file(path, steps, header: dict) -> None:
    lines = ["# gcqca kernel"]
    lines.append(" ".join(f"{k}={v}" for k, v in header.items()))
    lines.append(f"digest={steps_digest(steps)}")
    lines.extend(format_step(s) for s in steps)
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_kernel_file(path) -> tuple[list[PulseStep], dict, str]:
    """Returns (steps, header dict, recorded digest)."""
    header: dict = {}
    digest = ""
    steps = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" in line.split()[0]:
                for item in line.split():
                    key, _, val = item.partition("=")
                    if key == "digest":
                        digest = val
                    else:
                        header[key] = val
                continue
            steps.append(parse_step(line, lineno))
    return steps, header, digest


# ---------------------------------------------------------------- programs

def write_program_file(path, program) -> None:
    lines = [f"cells={program.descriptor.n_cells}"]
    qpart = ",".join(f"q{i}:{c}" for i, c in sorted(program.layout.qubit_cell.items()))
    lines.append(f"layout={qpart};cu:{program.layout.cu_cell}")
    lines.append(f"kernel-digest={program.kernel_digest}")
    lines.extend(format_step(s) for s in program.steps)
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_program_file(path):
    """Returns (n_cells, qubit_cell dict, cu_cell, kernel_digest, steps)."""
    n_cells = None
    qubit_cell: dict[int, int] = {}
    cu_cell = None
    kernel_digest = ""
    steps = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if line.startswith("cells="):
                n_cells = int(line.partition("=")[2])
            elif line.startswith("layout="):
                body = line.partition("=")[2]
                qpart, _, cupart = body.partition(";")
                for item in qpart.split(","):
                    name, _, cell = item.partition(":")
                    qubit_cell[int(name.lstrip("q"))] = int(cell)
                cu_cell = int(cupart.partition(":")[2])
            elif line.startswith("kernel-digest="):
                kernel_digest = line.partition("=")[2]
            else:
                steps.append(parse_step(line, lineno))
    if n_cells is None:
        raise ParseError("missing cells= header")
    return n_cells, qubit_cell, cu_cell, kernel_digest, steps
