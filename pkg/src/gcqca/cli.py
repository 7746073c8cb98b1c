"""Command-line front end.

Subcommands: compile, verify, trace, synthesize.  Exit codes are a stable
contract: 0 success, 2 input or compile error, 3 verification failure,
4 synthesis not found.
"""
from __future__ import annotations

import argparse
import sys

from .circuit import parse_circuit
from .collective import GateId
from .compiler import PulseProgram, check_well_formed, compile
from .errors import (GcqcaError, KernelNotFound, KernelUnavailable,
                     LayoutInvalid, MarginExceeded, ParseError)
from .layout import CU, build_layout, qubit_key
from .programio import steps_digest, write_kernel_file, write_program_file
from .synthesizer import (KernelSpec, default_alphabet, swap_only_alphabet,
                          synthesize, verify_kernel)

FIDELITY_MIN = 1.0 - 1e-9
LEAKAGE_MAX = 1e-10


def _layout_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--qubits", type=int, required=True, metavar="k",
                   help="number of logical qubits")
    p.add_argument("--margin", type=int, default=6,
                   help="blank cells at each end of the array (even)")
    p.add_argument("--first-gap", type=int, default=3, choices=(3, 5),
                   help="blanks between qubits 0 and 1")
    p.add_argument("--kernel", metavar="PATH", default=None,
                   help="copy-kernel file overriding the packaged default")


def _build(args):
    with open(args.circuit) as fh:
        text = fh.read()
    circuit = parse_circuit(text, args.qubits)
    descriptor, layout = build_layout(args.qubits, args.margin,
                                      args.first_gap)
    kernels = None
    if args.kernel is not None:
        from .synthesizer import load_kernel_info
        info = load_kernel_info(args.kernel)
        kernels = {(info.side, info.close_side): info}
    return circuit, layout, compile(circuit, layout, kernels)


def cmd_compile(args) -> int:
    _, _, program = _build(args)
    problems = check_well_formed(program)
    if problems:
        print("\n".join(problems), file=sys.stderr)
        return 2
    write_program_file(args.out, program)
    print(f"wrote {args.out}: {len(program.steps)} steps")
    return 0


def cmd_verify(args) -> int:
    from .verifier import logical_unitary, phase_fidelity, reference_unitary
    circuit, _, program = _build(args)
    extraction = logical_unitary(program)
    fidelity = phase_fidelity(extraction.u_logical,
                              reference_unitary(circuit))
    ok = fidelity >= FIDELITY_MIN and extraction.leakage <= LEAKAGE_MAX
    print(f"steps:    {len(program.steps)}")
    print(f"fidelity: {fidelity:.12f}")
    print(f"leakage:  {extraction.leakage:.3e}")
    print(f"verdict:  {'PASS' if ok else 'FAIL'}")
    return 0 if ok else 3


def cmd_trace(args) -> int:
    """One occupancy row per step boundary, derived from tracked positions.

    Cells inside an active kernel window print '?': their contents are
    transiently entangled, so occupancy symbols would be meaningless.
    """
    _, _, program = _build(args)
    n = program.descriptor.n_cells
    smeared: dict[int, range] = {}
    for lo, hi in program.kernel_ranges:
        centers = program.position_log[lo].values()
        span = range(max(0, min(centers) - 5), min(n, max(centers) + 6))
        for i in range(lo + 1, hi):
            smeared[i] = span

    for i in range(len(program.steps) + 1):
        cells = ["."] * n
        for c in smeared.get(i, ()):
            cells[c] = "?"
        for name, c in program.position_log[i].items():
            if cells[c] != "?":
                cells[c] = "C" if name == CU else name
        note = ""
        if i < len(program.steps):
            step = program.steps[i]
            note = f"   {step.phase.value} {step.gate.gate_id.value}"
            if step.gate.gate_id is GateId.CTRL_U:
                note += f" {step.gate.orientation.value}"
        print(" ".join(f"{s:>2}" for s in cells) + note)
    return 0


def cmd_synthesize(args) -> int:
    alphabet = (swap_only_alphabet() if args.swap_only
                else default_alphabet())
    spec = KernelSpec(window_size=args.window, max_len=args.max_len,
                      alphabet=alphabet)
    try:
        seq = synthesize(spec)
    except KernelNotFound as exc:
        print(f"not found: {exc}", file=sys.stderr)
        return 4
    report = verify_kernel(seq, spec, tol=args.tolerance)
    if not report.passed:
        print("error: synthesized sequence fails at the requested tolerance",
              file=sys.stderr)
        return 4
    header = {
        "window": spec.window_size,
        "y": spec.y_cell,
        "cu": spec.cu_cell,
        "carrier": report.carrier_cell,
        "close": spec.close_side,
    }
    write_kernel_file(args.out, seq, header)
    print(f"wrote {args.out}: {len(seq)} steps, "
          f"digest {steps_digest(seq)}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="gcqca",
        description="compile and verify globally-controlled cell-array "
                    "pulse programs")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compile", help="lower a circuit to a pulse program")
    p.add_argument("circuit")
    _layout_args(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("verify", help="compile and check against the "
                                      "reference unitary")
    p.add_argument("circuit")
    _layout_args(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("trace", help="print per-step occupancy rows")
    p.add_argument("circuit")
    _layout_args(p)
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("synthesize", help="search for a copy kernel")
    p.add_argument("--window", type=int, default=10)
    p.add_argument("--max-len", type=int, default=12)
    p.add_argument("--tolerance", type=float, default=1e-12)
    p.add_argument("--swap-only", action="store_true",
                   help="restrict the alphabet to SWAP (negative control)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synthesize)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, LayoutInvalid, MarginExceeded, KernelUnavailable,
            FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except GcqcaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
