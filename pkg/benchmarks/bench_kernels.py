#!/usr/bin/env python3
"""Compare the compiled strided kernels against the numpy fallback.

Two views: raw kernel microbenchmarks over representative register shapes,
and an end-to-end measured-protocol workload (compile + run of random
circuits).  Select a backend for the end-to-end numbers by re-running the
script under ``QVSIM_KERNELS=py`` / ``=cy``; the raw section always times
both implementations side by side.

Usage: python benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import time

import numpy as np

from qvsim import _kernels_py

try:
    from qvsim import _kernels_cy
except ImportError:
    _kernels_cy = None

from qvsim import kernels
from qvsim.adqc import compile_logical, run


def _rand_state(dims, rng):
    total = int(np.prod(dims))
    a = rng.normal(size=total) + 1j * rng.normal(size=total)
    return a / np.linalg.norm(a)


def _rand_unitary(block, rng):
    g = rng.normal(size=(block, block)) + 1j * rng.normal(size=(block, block))
    q, r = np.linalg.qr(g)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def time_call(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_raw(repeat):
    rng = np.random.default_rng(0)
    shapes = [
        ((2,) * 10, (4,), "1q gate, 10 qubits"),
        ((2,) * 16, (8,), "1q gate, 16 qubits"),
        ((2,) * 16, (3, 11), "2q gate, 16 qubits"),
        ((5,) * 4, (2,), "1-QV gate, 4 ququints"),
        ((5,) * 4, (0, 3), "2-QV gate, 4 ququints"),
        ((3,) * 8, (2, 6), "2-QV gate, 8 qutrits"),
    ]
    impls = [("python", _kernels_py)]
    if _kernels_cy is not None:
        impls.append(("cython", _kernels_cy))

    print(f"{'case':<28} {'op':<12}" + "".join(f" {name:>12}" for name, _ in impls)
          + f" {'speedup':>9}")
    for dims, targets, label in shapes:
        amps = _rand_state(dims, rng)
        block = int(np.prod([dims[t] for t in targets]))
        u = _rand_unitary(block, rng)
        perm = rng.permutation(block).astype(np.int64)
        phases = np.exp(1j * rng.uniform(0, 2 * np.pi, block))
        rows = [
            ("unitary", lambda im: im.apply_unitary(amps, dims, targets, u)),
            ("permphase", lambda im: im.apply_permphase(amps, dims, targets,
                                                        perm, phases)),
            ("probs", lambda im: im.subsystem_probs(amps, dims, targets[0])),
        ]
        for op, call in rows:
            times = [time_call(lambda im=impl: call(im), repeat)
                     for _, impl in impls]
            speed = times[0] / times[-1] if len(times) > 1 else float("nan")
            cells = "".join(f" {t * 1e6:>10.1f}us" for t in times)
            print(f"{label:<28} {op:<12}{cells} {speed:>8.1f}x")


def bench_protocol(repeat):
    rng = np.random.default_rng(1)
    names = ("F", "P", "X", "Z", "CZ", "R", "D3")
    print(f"\nend-to-end measured protocol (backend: {kernels.BACKEND})")
    for d, n, depth in ((2, 3, 20), (3, 3, 20), (5, 3, 20)):
        ops = []
        for _ in range(depth):
            g = names[rng.integers(len(names))]
            if g == "F":
                ops.append(("F", int(rng.integers(n))))
            elif g in ("X", "Z"):
                ops.append((g, int(rng.integers(1, d)), int(rng.integers(n))))
            elif g == "P":
                ops.append(("P", int(rng.integers(2 * d)), int(rng.integers(n))))
            elif g == "CZ":
                r, s = rng.choice(n, 2, replace=False)
                ops.append(("CZ", int(r), int(s)))
            elif g == "R":
                ops.append(("R", tuple(rng.uniform(0, 2 * np.pi, d)),
                            int(rng.integers(n))))
            else:
                ops.append(("D3", int(rng.integers(1, d)), int(rng.integers(n))))
        prog = compile_logical(ops, d, n)
        steps = len(prog.steps)
        t = time_call(lambda: run(prog, seed=7), repeat)
        print(f"  d={d} n={n} depth={depth} ({steps} steps): "
              f"{t * 1e3:7.2f} ms/run  ({t / steps * 1e6:6.1f} us/step)")


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    if _kernels_cy is None:
        print("note: compiled backend unavailable, raw table shows python only")
    bench_raw(args.repeat)
    bench_protocol(args.repeat)


if __name__ == "__main__":
    main()
