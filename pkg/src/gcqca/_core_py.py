"""Pure-numpy fallback for the hot pair-gate kernel.

The compiled extension (_core.pyx) implements the same entry point; the
active implementation is chosen in `backend`.
"""
from __future__ import annotations

import numpy as np

BACKEND_NAME = "python"


def _group_indices(n: int, b_hi: int, b_lo: int) -> np.ndarray:
    """Indices with bits b_hi and b_lo both clear, enumerated over the rest.

    b_hi and b_lo are bit positions (0 = least significant), b_hi != b_lo.
    """
    p, q = (b_hi, b_lo) if b_hi > b_lo else (b_lo, b_hi)
    r = np.arange(1 << (n - 2), dtype=np.int64)
    low = r & ((1 << q) - 1)
    mid = (r >> q) & ((1 << (p - q - 1)) - 1)
    high = r >> (p - 1)
    return (high << (p + 1)) | (mid << (q + 1)) | low


def apply_pair_inplace(amps: np.ndarray, n: int, b_hi: int, b_lo: int,
                       u4: np.ndarray) -> None:
    """Apply a 4x4 unitary to the two qubits at bit positions b_hi, b_lo.

    u4 is ordered over |v_hi v_lo> with v_hi the more significant gate bit.
    Modifies amps in place.
    """
    i00 = _group_indices(n, b_hi, b_lo)
    i01 = i00 | (1 << b_lo)
    i10 = i00 | (1 << b_hi)
    i11 = i10 | (1 << b_lo)
    block = np.stack([amps[i00], amps[i01], amps[i10], amps[i11]])
    out = u4 @ block
    amps[i00] = out[0]
    amps[i01] = out[1]
    amps[i10] = out[2]
    amps[i11] = out[3]
