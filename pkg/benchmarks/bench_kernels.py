"""Compare the compiled kernels with the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--pipeline]
"""
from __future__ import annotations

import argparse
import os
import random
import subprocess
import sys
import timeit
from fractions import Fraction

from leviflat import _kernels as pure
from leviflat.algebra.numbers import GaussianRational, Q
from leviflat.algebra.poly import ConjPolynomial

try:
    from leviflat import _speedups as compiled
except ImportError:
    compiled = None


def random_poly(rng, n, degree, terms):
    out = {}
    for _ in range(terms):
        exps = [0] * (2 * n)
        for _ in range(rng.randint(0, degree)):
            exps[rng.randrange(2 * n)] += 1
        out[(tuple(exps[:n]), tuple(exps[n:]))] = GaussianRational(
            Fraction(rng.randint(-9, 9), rng.randint(1, 9)), Fraction(rng.randint(-9, 9), rng.randint(1, 9))
        )
    return ConjPolynomial(n, out)


def random_row(rng, width, density):
    return {j: Q(rng.randint(-9, 9), rng.randint(1, 9)) for j in range(width) if rng.random() < density}


def bench(label, fn, repeat):
    best = min(timeit.repeat(fn, number=1, repeat=repeat))
    print(f"  {label:<10} {best * 1e3:9.2f} ms")
    return best


PIPELINE = """
import random, time
from leviflat.algebra.numbers import GaussianRational
from leviflat.algebra.poly import ConjPolynomial
from leviflat.levi import HypersurfaceGerm
from leviflat.normal_form import sum_of_squares, theorem1_pipeline
from leviflat import kernels
rng = random.Random(0)
n = 3
g = ConjPolynomial.zero(n)
for d in (3, 4):
    for _ in range(3):
        e = [0] * n
        for _ in range(d):
            e[rng.randrange(n)] += 1
        g = g + ConjPolynomial(n, {(tuple(e), (0,) * n): GaussianRational(rng.randint(-3, 3), rng.randint(-3, 3))})
F = (sum_of_squares(n, n) + g).real_part()
t = time.perf_counter()
theorem1_pipeline(HypersurfaceGerm(F, 8), 8)
print(kernels.BACKEND, time.perf_counter() - t)
"""


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--pipeline", action="store_true", help="also time a full pipeline run per backend")
    args = ap.parse_args(argv)
    rng = random.Random(args.seed)
    backends = [("python", pure)] + ([("cython", compiled)] if compiled is not None else [])
    if compiled is None:
        print("compiled extension not built; timing the pure-Python kernels only")

    for n, degree, terms, N in ((2, 6, 60, 8), (4, 6, 150, 8)):
        a, b = random_poly(rng, n, degree, terms), random_poly(rng, n, degree, terms)
        ta, tb, limit = a.term_list(), b.term_list(), a.codec.limit(N)
        print(f"mul_terms: n={n}, {len(ta)} x {len(tb)} terms, N={N}")
        times = {name: bench(name, lambda m=mod: m.mul_terms(ta, tb, limit), args.repeat) for name, mod in backends}
        if len(times) == 2:
            print(f"  speed-up   {times['python'] / times['cython']:9.2f}x")

    width = 2000
    rows = [random_row(rng, width, 0.2) for _ in range(200)]
    pivot = random_row(rng, width, 0.2)
    print(f"row_axpy: 200 rows of width {width}, density 0.2")
    times = {}
    for name, mod in backends:
        def run(mod=mod):
            for r in rows:
                mod.row_axpy(dict(r), pivot, Q(3, 7), -1)
        times[name] = bench(name, run, args.repeat)
    if len(times) == 2:
        print(f"  speed-up   {times['python'] / times['cython']:9.2f}x")

    if args.pipeline:
        print("pipeline: random Burns-Gong germ, n=3, N=8")
        for flag in ("", "1"):
            env = dict(os.environ, LEVIFLAT_PURE_PYTHON=flag)
            out = subprocess.run([sys.executable, "-c", PIPELINE], env=env, capture_output=True, text=True, check=True)
            backend, secs = out.stdout.split()
            print(f"  {backend:<10} {float(secs) * 1e3:9.2f} ms")


if __name__ == "__main__":
    main()
