"""Search for and verification of the copy kernel.

The copy kernel is a short sequence of collective steps that, on a window
holding the CU next to a control qubit Y, moves Y's computational-basis
value onto a designated cell of the CU's sublattice while

  R1  leaving every other cell of that sublattice in state 0 (so a later
      collective controlled gate sees only blanks and the carrier on its
      control side),
  R2  acting as the exact identity (phases included) on any window with no
      CU and at most one qubit,
  R3  being invertible step by step within the alphabet, and
  R4  disturbing only cells inside the layout's working-room allowance.

`synthesize` runs an iterative-deepening exhaustive search over the
alphabet with transposition pruning; `verify_kernel` is the independent
acceptance predicate for any candidate sequence.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._core_py import _group_indices
from .array_core import ArrayDescriptor
from .collective import (CollectiveGate, GateId, Orientation, Phase,
                         PulseStep, _step_permutation, cnot, ctrl_h, ctrl_y,
                         gate_matrix, nand_gate, phase_pairs, reverse_steps,
                         swap_gate)
from .errors import KernelNotFound, KernelUnavailable

TOL = 1e-12


def default_alphabet() -> list[CollectiveGate]:
    return [
        swap_gate(),
        cnot(Orientation.CTRL_LEFT),
        cnot(Orientation.CTRL_RIGHT),
        ctrl_h(Orientation.CTRL_LEFT),
        ctrl_h(Orientation.CTRL_RIGHT),
        ctrl_y(Orientation.CTRL_LEFT),
        ctrl_y(Orientation.CTRL_RIGHT),
        nand_gate(),
    ]


def swap_only_alphabet() -> list[CollectiveGate]:
    return [swap_gate()]


@dataclass
class KernelSpec:
    window_size: int = 10
    y_cell: int = 4
    cu_cell: int = 5
    carrier_cell: int | None = None    # None: any odd window cell may carry
    close_side: int = -1               # side where a qubit may sit 4 cells away
    max_len: int = 12
    alphabet: list[CollectiveGate] = field(default_factory=default_alphabet)
    allowance: tuple[int, int] = (5, 3)

    def __post_init__(self):
        if self.y_cell % 2 != 0:
            raise ValueError("y_cell must be even (A species)")
        if self.cu_cell % 2 != 1 or abs(self.cu_cell - self.y_cell) != 1:
            raise ValueError("cu_cell must be the odd cell adjacent to y_cell")
        if self.carrier_cell is not None and self.carrier_cell % 2 != 1:
            raise ValueError("carrier_cell must be odd (B species)")
        if not 2 <= self.window_size <= 14:
            raise ValueError("window_size out of supported range")
        if self.close_side not in (-1, 1):
            raise ValueError("close_side must be -1 (left) or +1 (right)")


@dataclass
class VerificationReport:
    r1: bool
    r2: bool
    r3: bool
    r4: bool
    carrier_cell: int | None = None
    footprint: tuple[int, int] | None = None   # (min, max) window cells
    witnesses: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.r1 and self.r2 and self.r3 and self.r4


# ------------------------------------------------------------ step appliers

def _make_applier(n: int, step: PulseStep):
    """Function applying one collective step to a (2**n, m) column batch."""
    gate = step.gate
    if gate.gate_id in (GateId.SWAP, GateId.NAND, GateId.CNOT, GateId.CTRL_Y):
        perm, factor = _step_permutation(n, step.phase, gate.gate_id,
                                         gate.orientation)
        fac = None if factor is None else np.asarray(factor,
                                                     dtype=np.complex128)[:, None]

        def apply_perm(b):
            out = b if perm is None else b[perm]
            if fac is not None:
                out = out * fac
            return np.ascontiguousarray(out)
        return apply_perm

    u4 = gate_matrix(gate)
    groups = []
    desc = ArrayDescriptor(n)
    for left, right in phase_pairs(desc, step.phase):
        i00 = _group_indices(n, desc.bit(left), desc.bit(right))
        groups.append((i00, i00 | (1 << desc.bit(right)),
                       i00 | (1 << desc.bit(left)),
                       i00 | (1 << desc.bit(left)) | (1 << desc.bit(right))))

    def apply_mix(b):
        out = b.copy()
        for i00, i01, i10, i11 in groups:
            blk = np.stack((out[i00], out[i01], out[i10], out[i11]))
            res = np.tensordot(u4, blk, axes=(1, 0))
            out[i00] = res[0]
            out[i01] = res[1]
            out[i10] = res[2]
            out[i11] = res[3]
        return out
    return apply_mix


def window_unitary(seq, n: int) -> np.ndarray:
    """Full 2**n x 2**n unitary of a step sequence on an n-cell window."""
    u = np.eye(1 << n, dtype=np.complex128)
    for step in seq:
        u = _make_applier(n, step)(u)
    return u


# ------------------------------------------------------------- verification

def _spectator_cells(spec: KernelSpec) -> list[int]:
    """Even window cells where a neighbouring qubit can legally sit.

    The layout gives every qubit three blank cells on one side and five on
    the other, so the nearest neighbour is four cells away on the close
    side; on the far side qubits start six cells away.  The kernel must be
    exactly transparent to qubits parked at any of these cells.
    """
    cells = []
    for c in range(0, spec.window_size, 2):
        d = c - spec.y_cell
        if d == 0:
            continue
        near = (d < 0) == (spec.close_side < 0)
        if abs(d) >= (4 if near else 6):
            cells.append(c)
    return cells


def _evolve_columns(appliers, n: int, basis_states):
    dim = 1 << n
    b = np.zeros((dim, len(basis_states)), dtype=np.complex128)
    for j, x in enumerate(basis_states):
        b[x, j] = 1.0
    for apply_step in appliers:
        b = apply_step(b)
    return b


def _occupied_cells(seq, spec: KernelSpec, atol: float = 1e-24) -> list[int]:
    """Window cells ever occupied while the copy runs.

    Simulates both copy inputs (CU with y = 0 / 1) through every prefix of
    the sequence and collects the cells whose occupation probability is
    nonzero at any point, including the initial CU and Y cells.
    """
    n = spec.window_size
    desc = ArrayDescriptor(n)
    dim = 1 << n
    idx = np.arange(dim)
    appliers = [_make_applier(n, step) for step in seq]
    maxp = np.zeros(n)
    for y in (0, 1):
        x_in = (1 << desc.bit(spec.cu_cell)) | (y << desc.bit(spec.y_cell))
        v = np.zeros((dim, 1), dtype=np.complex128)
        v[x_in, 0] = 1.0
        states = [v]
        for apply_step in appliers:
            v = apply_step(v)
            states.append(v)
        for v in states:
            p2 = np.abs(v[:, 0]) ** 2
            for c in range(n):
                on = (idx >> desc.bit(c)) & 1 == 1
                maxp[c] = max(maxp[c], p2[on].sum())
    return [c for c in range(n) if maxp[c] > atol]


def _final_garbage_cells(seq, spec: KernelSpec, carrier_cell: int,
                         atol: float = 1e-18) -> tuple[int, ...]:
    """Window cells still occupied when the copy finishes, beyond the
    carrier and Y's nominal cell.

    Both copy inputs end in basis states, so this is exact.  These
    by-products are removed by the uncomputation half, but until then they
    ride every transport like any other occupant and must be position-
    tracked so edge truncation is detected rather than silently scrambled.
    """
    n = spec.window_size
    desc = ArrayDescriptor(n)
    idx = np.arange(1 << n)
    appliers = [_make_applier(n, step) for step in seq]
    r0 = 1 << desc.bit(spec.cu_cell)
    r1 = r0 | (1 << desc.bit(spec.y_cell))
    p2 = np.abs(_evolve_columns(appliers, n, [r0, r1])) ** 2
    cells = []
    for c in range(n):
        if c in (spec.y_cell, carrier_cell):
            continue
        on = (idx >> desc.bit(c)) & 1 == 1
        if p2[on].sum() > atol:
            cells.append(c)
    return tuple(cells)


def verify_kernel(seq, spec: KernelSpec,
                  tol: float = TOL) -> VerificationReport:
    n = spec.window_size
    desc = ArrayDescriptor(n)
    dim = 1 << n
    idx = np.arange(dim)
    appliers = [_make_applier(n, step) for step in seq]

    # Tracked basis inputs: the CU-free configurations with at most one
    # qubit, the two copy inputs, and the copy inputs with spectator qubits
    # parked at every legal cell combination (each single cell, and one
    # qubit on each side of Y).
    small = [0] + [1 << desc.bit(c) for c in range(0, n, 2)]
    r0x = 1 << desc.bit(spec.cu_cell)
    r1x = r0x | (1 << desc.bit(spec.y_cell))
    spect_cells = _spectator_cells(spec)
    lefts = [c for c in spect_cells if c < spec.y_cell]
    rights = [c for c in spect_cells if c > spec.y_cell]
    spect_sets = ([[c] for c in spect_cells]
                  + [[l, r] for l in lefts for r in rights])
    xs = list(small) + [r0x, r1x]
    for cells in spect_sets:
        sb = sum(1 << desc.bit(c) for c in cells)
        xs += [r0x | sb, r1x | sb]
    cols = _evolve_columns(appliers, n, xs)

    # R2: exact identity (phases included) on every CU-free window holding
    # at most one qubit.  Multi-qubit windows are unconstrained: requiring
    # them leak-free alongside R1 is unsatisfiable (a unitary that keeps
    # the whole B-clean subspace invariant keeps its complement invariant
    # too, and the CU-only input lives in the complement).
    r2 = True
    r2_witness = None
    for j, x in enumerate(small):
        col = cols[:, j]
        if (abs(col[x] - 1.0) > tol
                or np.linalg.norm(col) ** 2 - abs(col[x]) ** 2 > tol):
            r2 = False
            r2_witness = int(x)
            break

    # R1: CU + Y input ends with Y's value on one B cell, rest of B track 0.
    # The same must hold verbatim with spectator qubits parked at the legal
    # neighbour cells: the copy output is then the blank-window output
    # tensor the untouched spectators, phases included.
    odd_cells = list(range(1, n, 2))
    odd_mask = sum(1 << desc.bit(c) for c in odd_cells)
    base = len(small)
    outs = [cols[:, base], cols[:, base + 1]]
    candidates = ([spec.carrier_cell] if spec.carrier_cell is not None
                  else odd_cells)
    carrier = None
    for c in candidates:
        ok = True
        for y, col in zip((0, 1), outs):
            want = (y << desc.bit(c))
            bad = (idx & odd_mask) != want
            if np.linalg.norm(col[bad]) ** 2 > tol:
                ok = False
                break
        if ok:
            carrier = c
            break
    r1 = carrier is not None
    if r1:
        for k, cells in enumerate(spect_sets):
            sb = sum(1 << desc.bit(c) for c in cells)
            keep = (idx & sb) == 0
            for y, col in zip((0, 1), outs):
                want = np.zeros(dim, dtype=np.complex128)
                want[idx[keep] | sb] = col[keep]
                got = cols[:, base + 2 + 2 * k + y]
                if np.linalg.norm(got - want) ** 2 > tol:
                    r1 = False
                    break
            if not r1:
                break
    r1_witness = None
    if not r1:
        r1_witness = {y: outs[y].copy() for y in (0, 1)}

    # R3: reversal within the alphabet undoes the sequence exactly.
    # Checked on every tracked column plus fixed dense probe states; each
    # alphabet step carries an exact inverse, so any reversal defect shows
    # up on these probes.
    rng = np.random.default_rng(0x9e7)
    probes = rng.normal(size=(dim, 3)) + 1j * rng.normal(size=(dim, 3))
    probes /= np.linalg.norm(probes, axis=0)
    fwd = probes.copy()
    for apply_step in appliers:
        fwd = apply_step(fwd)
    back = np.concatenate([cols, fwd], axis=1)
    for apply_step in [_make_applier(n, s) for s in reverse_steps(seq)]:
        back = apply_step(back)
    start = np.zeros((dim, len(xs)), dtype=np.complex128)
    for j, x in enumerate(xs):
        start[x, j] = 1.0
    start = np.concatenate([start, probes], axis=1)
    r3 = bool(np.max(np.linalg.norm(back - start, axis=0)) <= tol)

    # R4: working room.  Every cell that is ever occupied while the copy
    # runs (any prefix of the sequence, either copy input) must lie within
    # the allowance around Y.  Occupancy is the right measure of
    # disturbance here: a cell that stays in |0> throughout carries no
    # garbage, while the steps' global action elsewhere is handled by R2
    # and by the uncomputation sandwich.
    occupied = _occupied_cells(seq, spec)
    footprint = (min(occupied), max(occupied)) if occupied else None
    big_room, small_room = max(spec.allowance), min(spec.allowance)
    if footprint is None:
        r4 = False   # the empty sequence copies nothing
    else:
        lo, hi = footprint
        left_room = spec.y_cell - lo
        right_room = hi - spec.y_cell
        # the close side holds only the small blank run; garbage must
        # spread toward the far side
        left_allow = small_room if spec.close_side < 0 else big_room
        right_allow = big_room if spec.close_side < 0 else small_room
        r4 = left_room <= left_allow and right_room <= right_allow

    witnesses = {}
    if r1_witness is not None:
        witnesses["r1"] = r1_witness
    if r2_witness is not None:
        witnesses["r2"] = r2_witness
    return VerificationReport(r1, r2, r3, r4, carrier, footprint, witnesses)


# ------------------------------------------------------------------ search

def _search_columns(spec: KernelSpec):
    """Search-state columns and witness vectors.

    Columns 0..1 are the copy inputs (CU with y = 0 / 1); the next pairs
    repeat them with a spectator qubit parked at each legal even cell; the
    trailing block holds the identity configurations (empty window and one
    qubit at each even cell).  Witness vectors are fixed random states used
    for cheap necessary orthogonality tests during the join: supported on
    the odd-occupied subspace, on >= 2 odd bits, on the CU-free subspace,
    and on the CU-free subspace with each spectator bit clear.
    """
    n = spec.window_size
    desc = ArrayDescriptor(n)
    dim = 1 << n
    idx = np.arange(dim)
    r0 = 1 << desc.bit(spec.cu_cell)
    r1 = r0 | (1 << desc.bit(spec.y_cell))
    sbits = [1 << desc.bit(c) for c in _spectator_cells(spec)]
    cols = [r0, r1]
    for sb in sbits:
        cols += [r0 | sb, r1 | sb]
    ident = [0] + [1 << desc.bit(c) for c in range(0, n, 2)]
    cols += ident
    b = np.zeros((dim, len(cols)), dtype=np.complex128)
    for j, x in enumerate(cols):
        b[x, j] = 1.0

    odd_mask = sum(1 << desc.bit(c) for c in range(1, n, 2))
    odd_bits = np.array([bin(int(x) & odd_mask).count("1") for x in idx])
    rng = np.random.default_rng(0x5eed)

    def witness(mask):
        v = np.where(mask, rng.normal(size=dim) + 1j * rng.normal(size=dim), 0)
        return v / np.linalg.norm(v)

    w = [witness(odd_bits >= 1), witness(odd_bits >= 2),
         witness(odd_bits == 0)]
    for sb in sbits:
        w.append(witness((odd_bits == 0) & ((idx & sb) == 0)))
    # (witness, column) pairs whose images must stay orthogonal in any
    # joined kernel: outputs of the y=0 inputs stay off the B track, and
    # outputs of the y=1 inputs stay off everything except the carrier
    conds = [(0, 0), (1, 1), (2, 1)]
    for j in range(len(sbits)):
        conds += [(0, 2 + 2 * j), (1, 3 + 2 * j), (2, 3 + 2 * j),
                  (3 + j, 2 + 2 * j)]
    return b, np.stack(w, axis=1), cols, sbits, len(ident), conds


def _involutive(step: PulseStep) -> bool:
    g = step.gate
    if g.gate_id is not GateId.CTRL_U:
        return True
    return bool(np.allclose(g.u @ g.u, np.eye(2), atol=TOL))


def synthesize(spec: KernelSpec, progress=None) -> list[PulseStep]:
    """Iterative-deepening exhaustive search for a verified copy kernel.

    Candidate lengths are covered in increasing order, each length split
    into a forward half and a reversed half met in the middle: every
    sequence of length 2h or 2h-1 factors as A followed by the reversal of
    some enumerable half B, and equality of their images on the identity
    configurations is necessary for the join to pass spectator
    transparency.  Halves are enumerated depth-first in fixed move order
    (alphabet order major, ALPHA before BETA) with transposition pruning;
    the pruning digest covers the tracked column images, random witness
    images, and the cumulative per-cell occupancy of the copy inputs, so a
    pruned branch is interchangeable with its representative for every
    requirement including the working-room footprint.  The first joined
    sequence passing verify_kernel wins; the procedure is deterministic.

    Raises KernelNotFound if no sequence within max_len passes.
    """
    n = spec.window_size
    desc = ArrayDescriptor(n)
    dim = 1 << n
    moves = []
    for gate in spec.alphabet:
        for phase in (Phase.ALPHA, Phase.BETA):
            step = PulseStep(phase, gate)
            moves.append((step, _make_applier(n, step)))

    b0, w0, cols, sbits, n_id, conds = _search_columns(spec)
    n_r = len(cols) - n_id    # copy columns; identity block follows
    occ_rows = np.zeros((n, dim))
    for c in range(n):
        occ_rows[c, (np.arange(dim) >> desc.bit(c)) & 1 == 1] = 1.0

    rng = np.random.default_rng(0xd16e57)
    proj = rng.normal(size=(2, dim)) + 1j * rng.normal(size=(2, dim))

    def steps_of(path):
        return [moves[i][0] for i in path]

    def try_candidate(pa, pb):
        if pa and pb and pa[-1] == pb[-1] and _involutive(moves[pa[-1]][0]):
            return None   # the seam would cancel; a shorter join covers it
        seq = steps_of(pa) + reverse_steps(steps_of(pb))
        if verify_kernel(seq, spec).passed:
            return seq
        return None

    chunk = 6000 if dim <= 1024 else 1500

    def evolve(paths, base):
        out = np.empty((len(paths), dim, base.shape[1]), dtype=np.complex64)
        for i, p in enumerate(paths):
            cur = base
            for mi in p:
                cur = moves[mi][1](cur)
            out[i] = cur
        return out

    def join(entries, la, lb):
        a_list = [p for p in entries if len(p) == la]
        b_list = [p for p in entries if len(p) == lb]
        if not a_list or not b_list:
            return None
        a_base = b0[:, :n_r]
        for alo in range(0, len(a_list), chunk):
            ac = a_list[alo:alo + chunk]
            ua = evolve(ac, a_base)
            uat = [np.ascontiguousarray(ua[:, :, i].T) for i in range(n_r)]
            ua = None
            for blo in range(0, len(b_list), chunk):
                bc = b_list[blo:blo + chunk]
                wb = evolve(bc, w0)
                ok = None
                for wi, ai in conds:
                    g = np.abs(wb[:, :, wi].conj() @ uat[ai]) < 2e-3
                    ok = g if ok is None else (ok & g)
                    if not ok.any():
                        break
                for bi, ai in zip(*np.nonzero(ok)):
                    found = try_candidate(ac[ai], bc[bi])
                    if found is not None:
                        return found
        return None

    h_max = (spec.max_len + 1) // 2
    for h in range(1, h_max + 1):
        if progress is not None:
            progress(h)
        memo: dict[bytes, int] = {}
        buckets: dict[bytes, list[bytes]] = {}
        keep = (0, h - 1, h) if h == 1 else (h - 1, h)

        def visit(b, occ, depth, path):
            if depth in keep:
                key = np.round(proj @ b[:, n_r:], 8).tobytes()
                buckets.setdefault(key, []).append(bytes(path))
            digest = (np.round(proj @ b, 8).tobytes()
                      + np.round(occ, 8).tobytes())
            prior = memo.get(digest)
            if prior is not None and prior <= depth:
                return
            memo[digest] = depth
            if depth == h:
                return
            for mi, (step, apply_step) in enumerate(moves):
                if path and mi == path[-1] and _involutive(step):
                    continue
                nb = apply_step(b)
                nocc = np.maximum(occ, occ_rows @ (np.abs(nb[:, :2]) ** 2))
                path.append(mi)
                visit(nb, nocc, depth + 1, path)
                path.pop()

        occ0 = occ_rows @ (np.abs(b0[:, :2]) ** 2)
        visit(b0, occ0, 0, [])

        totals = [t for t in ((1, 2) if h == 1 else (2 * h - 1, 2 * h))
                  if t <= spec.max_len]
        for t in totals:
            la, lb = h, t - h
            for entries in buckets.values():
                found = join(entries, la, lb)
                if found is not None:
                    return found
    raise KernelNotFound(
        f"no copy kernel of length <= {spec.max_len} over the given alphabet")


# ------------------------------------------------------- packaged kernels

def load_kernel_info(path):
    """Read a kernel file, re-verify it, and wrap it for the compiler.

    Raises KernelUnavailable on a missing file, or one whose contents no
    longer pass verification (digest mismatch or tampered steps).
    """
    from .compiler import KernelInfo
    from .programio import read_kernel_file, steps_digest

    try:
        seq, header, digest = read_kernel_file(path)
    except OSError as exc:
        raise KernelUnavailable(f"cannot read kernel file: {exc}") from None
    if steps_digest(seq) != digest:
        raise KernelUnavailable(f"kernel digest mismatch in {path}")
    try:
        spec = KernelSpec(window_size=int(header["window"]),
                          y_cell=int(header["y"]),
                          cu_cell=int(header["cu"]),
                          carrier_cell=int(header["carrier"]),
                          close_side=int(header.get("close", -1)))
    except (KeyError, ValueError) as exc:
        raise KernelUnavailable(f"bad kernel header in {path}: {exc}") from None
    report = verify_kernel(seq, spec)
    if not report.passed:
        raise KernelUnavailable(
            f"kernel in {path} fails verification "
            f"(r1={report.r1} r2={report.r2} r3={report.r3} r4={report.r4})")
    garbage = _final_garbage_cells(seq, spec, spec.carrier_cell)
    return KernelInfo(tuple(seq), spec.window_size, spec.y_cell,
                      spec.cu_cell, spec.carrier_cell, spec.close_side,
                      garbage, digest)


def default_kernels():
    """Packaged kernel variants, keyed by (CU arrival side, close side).

    The CU arrival side is forced by transport parity, and the close side
    is where the control qubit's nearest neighbour sits, so the compiler
    needs all four combinations.
    """
    from importlib import resources

    names = {(1, -1): "kernel_right_close_left.txt",
             (1, 1): "kernel_right_close_right.txt",
             (-1, -1): "kernel_left_close_left.txt",
             (-1, 1): "kernel_left_close_right.txt"}
    kernels = {}
    for key, name in names.items():
        ref = resources.files("gcqca.data") / name
        if not ref.is_file():
            raise KernelUnavailable(f"packaged kernel {name} is missing")
        with resources.as_file(ref) as path:
            info = load_kernel_info(path)
        if (info.side, info.close_side) != key:
            raise KernelUnavailable(f"packaged kernel {name} declares the "
                                    f"wrong geometry")
        kernels[key] = info
    return kernels


def default_kernel():
    """The packaged kernel for the CU arriving right of the qubit."""
    return default_kernels()[(1, -1)]
