"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import math
import timeit

import numpy as np

from quasispec._backend import BACKENDS

OMEGA = math.pi * (math.sqrt(5) - 1)


def cases():
    rng = np.random.default_rng(0)
    theta = rng.uniform(0, 2 * math.pi, 256)
    h = np.arange(256) % 2
    d, off = rng.normal(size=500), rng.uniform(0.5, 1.0, 499)
    E = np.linspace(-3, 3, 400)
    th = np.linspace(0, 2 * math.pi, 16, endpoint=False)
    return {
        "orbit_log_norms 256 orbits x 4096 steps":
            lambda k: k.orbit_log_norms(0.2, 2.0, [1.0, -1.0], OMEGA, theta, h, [1024, 4096]),
        "orbit_product 10^5 steps":
            lambda k: k.orbit_product(0.2, 2.0, [1.0, -1.0], OMEGA, 0.3, 0, 100_000, False),
        "discriminant_grid 400 E x 16 theta, period 178":
            lambda k: k.discriminant_grid(E, th, 1.0, [1.0], 2 * math.pi * 55 / 89, 178),
        "tridiag_eigvalsh n=500":
            lambda k: k.tridiag_eigvalsh(d, off, 1e-10),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    names = sorted(BACKENDS)
    print(f"{'kernel':50s}" + "".join(f"{n:>12s}" for n in names) + ("     speedup" if len(names) > 1 else ""))
    for label, fn in cases().items():
        best = {n: min(timeit.repeat(lambda: fn(BACKENDS[n]), number=1, repeat=args.repeat)) for n in names}
        row = f"{label:50s}" + "".join(f"{best[n]:11.4f}s" for n in names)
        if "cython" in best:
            row += f"{best['python'] / best['cython']:11.1f}x"
        print(row)


if __name__ == "__main__":
    main()
