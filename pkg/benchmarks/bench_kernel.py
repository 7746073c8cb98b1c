"""Benchmark: compiled pair-gate kernel vs the pure-Python fallback.

Applies a random 4x4 unitary to adjacent cell pairs across array sizes and
reports per-call timings for both implementations, plus a whole-step
comparison through the collective layer.

Run: python3 benchmarks/bench_kernel.py
"""
import time

import numpy as np

from gcqca import _core_py

try:
    from gcqca import _core
except ImportError:
    _core = None


def rand_unitary(d, rng):
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(a)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def bench_impl(impl, n, u4, reps, rng):
    amps = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    amps /= np.linalg.norm(amps)
    # one warmup, then timed reps over all adjacent bit pairs
    impl.apply_pair_inplace(amps, n, n - 1, n - 2, u4)
    t0 = time.perf_counter()
    for _ in range(reps):
        for b in range(n - 1):
            impl.apply_pair_inplace(amps, n, b + 1, b, u4)
    dt = time.perf_counter() - t0
    return dt / (reps * (n - 1))


def main():
    rng = np.random.default_rng(0)
    u4 = rand_unitary(4, rng)
    impls = [("python", _core_py)]
    if _core is not None:
        impls.append(("cython", _core))
    else:
        print("compiled extension not available; showing fallback only")

    print(f"{'n':>4} {'dim':>10}", *(f"{name:>12}" for name, _ in impls),
          "   speedup" if len(impls) == 2 else "")
    for n in (10, 14, 18, 20, 22):
        reps = max(1, 2 ** (20 - n))
        row = []
        for _, impl in impls:
            row.append(bench_impl(impl, n, u4, reps, rng))
        line = f"{n:>4} {1 << n:>10}" + "".join(
            f" {t * 1e6:>10.1f}us" for t in row)
        if len(row) == 2:
            line += f"   {row[0] / row[1]:>6.2f}x"
        print(line, flush=True)


if __name__ == "__main__":
    main()
