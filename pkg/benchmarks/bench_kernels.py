"""Time the Cayley-table kernels on each available backend.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--csv out.csv]
"""
import argparse
import csv
import sys
import timeit

import numpy as np

from cocycle_lab import kernels
from cocycle_lab.groups import build_cyclic, build_symmetric, build_word_ball

CASES = [
    ("Z64", lambda: build_cyclic(64)),
    ("S5", lambda: build_symmetric(5)),
    ("Z512", lambda: build_cyclic(512)),
    ("ball(2,5)", lambda: build_word_ball(2, 5)),
]


def _operands(group, rng):
    n = group.order
    a = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    b = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    if not getattr(group, "closed", True):
        # keep products inside the ball
        inner = group.inner(group.radius // 2)
        mask = np.zeros(n, dtype=bool)
        mask[inner] = True
        a, b = a * mask, b * mask
    return a, b


def bench(repeat):
    rng = np.random.default_rng(0)
    rows = []
    for name, make in CASES:
        g = make()
        a, b = _operands(g, rng)
        ops = {
            "convolve": lambda impl: kernels.convolve(g.mul, a, b, backend=impl),
            "gram_convolve": lambda impl: kernels.gram_convolve(g.mul, g.inv, a, b, backend=impl),
        }
        if getattr(g, "closed", True):
            ops["regular_matrix"] = lambda impl: kernels.regular_matrix(g.mul, a, backend=impl)
            ops["is_latin"] = lambda impl: kernels.is_latin(g.mul, backend=impl)
        for op, fn in ops.items():
            for backend, impl in sorted(kernels.backends().items()):
                timer = timeit.Timer(lambda: fn(impl))
                loops, _ = timer.autorange()
                best = min(timer.repeat(repeat, loops)) / loops
                rows.append({"case": name, "order": g.order, "op": op, "backend": backend,
                             "seconds": best})
    return rows


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--csv", help="write the raw timings here")
    args = ap.parse_args(argv)
    rows = bench(args.repeat)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=list(rows[0]))
            w.writeheader()
            w.writerows(rows)
    by_key = {(r["case"], r["op"], r["backend"]): r["seconds"] for r in rows}
    print(f"{'case':<10} {'op':<15} {'python':>12} {'cython':>12} {'speedup':>8}")
    for case, op in dict.fromkeys((r["case"], r["op"]) for r in rows):
        py = by_key[(case, op, "python")]
        cy = by_key.get((case, op, "cython"))
        speed = f"{py / cy:8.1f}" if cy else "       -"
        cy_s = f"{cy * 1e6:10.1f}us" if cy else "           -"
        print(f"{case:<10} {op:<15} {py * 1e6:10.1f}us {cy_s} {speed}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
