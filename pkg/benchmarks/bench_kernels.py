#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-Python fallback.

Times Howell reduction and integer SNF on seeded random inputs of the sizes
the workbench actually hits (many small mod-m systems, medium boundary
remainders), then a whole-pipeline sample (GL poset homology).

Run:  python3 benchmarks/bench_kernels.py
"""

import random
import time

from wittlab import kernels


def rand_matrix(rng, r, n, lo, hi):
    return [[rng.randrange(lo, hi) for _ in range(n)] for _ in range(r)]


def bench_howell(impl, rng, reps=2000):
    cases = [(rand_matrix(rng, rng.randrange(2, 8), rng.randrange(2, 10), 0, 8),
              rng.choice([2, 3, 4, 8, 9]))
             for _ in range(40)]
    t0 = time.perf_counter()
    for _ in range(reps // 40):
        for A, m in cases:
            impl.howell_aug(A, m)
    return time.perf_counter() - t0


def boundary_like(rng, rows, cols, per_col=4):
    """Sparse +-1 matrices shaped like the boundary matrices the homology
    pipeline feeds to SNF."""
    A = [[0] * cols for _ in range(rows)]
    for c in range(cols):
        for i, r in enumerate(rng.sample(range(rows), per_col)):
            A[r][c] = 1 if i % 2 == 0 else -1
    return A


def bench_snf(impl, rng, reps=60):
    """Times SNF with the production semantics: the compiled kernel hands
    coefficient explosions to the big-integer fallback."""
    from wittlab.kernels import pure

    cases = [boundary_like(rng, 40, 90) for _ in range(6)]
    fallbacks = 0
    t0 = time.perf_counter()
    for _ in range(reps // 6):
        for A in cases:
            try:
                impl.snf_divisors(A)
            except OverflowError:
                fallbacks += 1
                pure.snf_divisors(A)
    return time.perf_counter() - t0, fallbacks


def bench_pipeline():
    import importlib
    import os
    import subprocess
    import sys

    out = {}
    code = (
        "import time; t0=time.time();"
        "from wittlab.rings import make_ring;"
        "from wittlab.modules import free_module;"
        "from wittlab.verify import verify_gl_connectivity;"
        "r = verify_gl_connectivity(free_module(make_ring({'kind':'gf','q':2}), 4), sr=1);"
        "assert r.verdict.ok();"
        "print('%.3f' % (time.time()-t0))"
    )
    for name, env_extra in [("speed", {}), ("pure", {"WITTLAB_PURE": "1"})]:
        env = dict(os.environ, **env_extra)
        proc = subprocess.run([sys.executable, "-c", code], env=env,
                              capture_output=True, text=True)
        out[name] = float(proc.stdout.strip()) if proc.returncode == 0 else None
    return out


def main():
    impls = kernels.implementations()
    print("available kernel implementations:", ", ".join(sorted(impls)))
    rows = []
    for name, impl in sorted(impls.items()):
        rng = random.Random(12345)
        th = bench_howell(impl, rng)
        ts, falls = bench_snf(impl, rng)
        rows.append((name, th, ts, falls))
    print()
    print("%-8s %14s %20s" % ("impl", "howell (s)", "snf+fallback (s)"))
    for name, th, ts, falls in rows:
        note = "  (%d bignum fallbacks)" % falls if falls else ""
        print("%-8s %14.3f %20.3f%s" % (name, th, ts, note))
    if len(rows) == 2:
        base = {name: (th, ts) for name, th, ts, _ in rows}
        if "pure" in base and "speed" in base:
            print()
            print("speedup: howell x%.1f, snf x%.1f" % (
                base["pure"][0] / base["speed"][0],
                base["pure"][1] / base["speed"][1]))
    print()
    print("end-to-end GL poset verification (GF(2)^4, both kernels):")
    for name, secs in sorted(bench_pipeline().items()):
        print("  %-6s %s" % (name, "%.2fs" % secs if secs else "failed"))


if __name__ == "__main__":
    main()
