"""Time the hot loops under each available backend.

    python3 benchmarks/bench_kernels.py [--repeat 5]

The first numba call per kernel includes JIT compilation (cached on disk
afterwards), so it is run once untimed before measuring.
"""

import argparse
import timeit

import numpy as np

from fima_stable import _kernels
from fima_stable.frac_calc import FractionalKernel, exp_kernel


def cases():
    rng = np.random.default_rng(0)
    u, e = rng.random(2_000_000), rng.exponential(size=2_000_000)
    x = rng.standard_cauchy(2_000_000)
    thetas = np.array([0.25, 0.5, 1.0, 2.0, 4.0])
    F = FractionalKernel(exp_kernel(1.0), 0.2)
    ds, vals = F.lookup_table()
    times = np.arange(1.0, 4097.0)
    nodes = np.linspace(-5000.0, 4096.0, 4000)
    cps = np.array([64, 256, 1024, 4096])
    lag_args = (times, nodes, cps, F.d, ds, vals, F.u_asym, F.tail.radius, F.tail.coefs)
    return {
        "cms_symmetric 2e6": lambda: _kernels.cms_symmetric(u, e, 1.5),
        "ecf_sums 2e6 x 5": lambda: _kernels.ecf_sums(x, thetas),
        "lagged_kernel_sums 4096 x 4000": lambda: _kernels.lagged_kernel_sums(*lag_args),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    table = cases()
    backends = _kernels.available_backends()
    print(f"{'kernel':<32}" + "".join(f"{b:>12}" for b in backends))
    for name, fn in table.items():
        row = []
        for b in backends:
            _kernels.set_backend(b)
            fn()
            row.append(min(timeit.repeat(fn, number=1, repeat=args.repeat)))
        print(f"{name:<32}" + "".join(f"{t * 1e3:>10.1f}ms" for t in row))


if __name__ == "__main__":
    main()
