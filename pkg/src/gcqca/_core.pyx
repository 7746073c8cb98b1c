# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled pair-gate kernel.  Same contract as _core_py.apply_pair_inplace."""

import numpy as np
cimport numpy as cnp

BACKEND_NAME = "cython"


def apply_pair_inplace(cnp.complex128_t[::1] amps, int n, int b_hi, int b_lo,
                       cnp.complex128_t[:, ::1] u4):
    cdef long long p, q, r, low, mid, high, i00, i01, i10, i11
    cdef long long nr = 1LL << (n - 2)
    cdef long long mask_hi = 1LL << b_hi
    cdef long long mask_lo = 1LL << b_lo
    cdef long long qmask, pmask
    cdef cnp.complex128_t a0, a1, a2, a3
    cdef cnp.complex128_t u00 = u4[0, 0], u01 = u4[0, 1], u02 = u4[0, 2], u03 = u4[0, 3]
    cdef cnp.complex128_t u10 = u4[1, 0], u11 = u4[1, 1], u12 = u4[1, 2], u13 = u4[1, 3]
    cdef cnp.complex128_t u20 = u4[2, 0], u21 = u4[2, 1], u22 = u4[2, 2], u23 = u4[2, 3]
    cdef cnp.complex128_t u30 = u4[3, 0], u31 = u4[3, 1], u32 = u4[3, 2], u33 = u4[3, 3]

    if b_hi > b_lo:
        p = b_hi
        q = b_lo
    else:
        p = b_lo
        q = b_hi
    qmask = (1LL << q) - 1
    pmask = (1LL << (p - 1)) - 1 - qmask

    for r in range(nr):
        low = r & qmask
        mid = r & pmask
        high = r >> (p - 1)
        i00 = (high << (p + 1)) | (mid << 1) | low
        i01 = i00 | mask_lo
        i10 = i00 | mask_hi
        i11 = i10 | mask_lo
        a0 = amps[i00]
        a1 = amps[i01]
        a2 = amps[i10]
        a3 = amps[i11]
        amps[i00] = u00 * a0 + u01 * a1 + u02 * a2 + u03 * a3
        amps[i01] = u10 * a0 + u11 * a1 + u12 * a2 + u13 * a3
        amps[i10] = u20 * a0 + u21 * a1 + u22 * a2 + u23 * a3
        amps[i11] = u30 * a0 + u31 * a1 + u32 * a2 + u33 * a3
