"""Compare the compiled and numpy kernel backends.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import timeit

import numpy as np

from mubtomo import _kernels_py, kernels
from mubtomo.mub import prime_mub_family


def cases(rng):
    c = rng.normal(size=7) + 1j * rng.normal(size=7)
    c /= np.linalg.norm(c)
    labels = np.arange(7) - 3.0
    x = np.linspace(-2e-2, 2e-2, 200_001)
    vecs = np.ascontiguousarray(prime_mub_family(7).stacked())
    p = rng.random((1000, 8, 7))
    p = np.ascontiguousarray(p / p.sum(axis=2, keepdims=True))
    return {
        "interference_pattern (D=7, 2e5 points)": lambda m: m.interference_pattern(c, labels, x, 1950.4, 487.6),
        "assemble_density (1000 x 8 x 7)": lambda m: m.assemble_density(p, vecs),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    impls = {"python": _kernels_py}
    if kernels.compiled_available():
        from mubtomo import _kernels

        impls["cython"] = _kernels
    else:
        print("compiled backend not built; timing numpy only")
    for name, fn in cases(np.random.default_rng(0)).items():
        times = {}
        for label, mod in impls.items():
            fn(mod)  # warm up
            times[label] = min(timeit.repeat(lambda: fn(mod), number=1, repeat=args.repeat))
        row = "  ".join(f"{k}: {v * 1e3:8.2f} ms" for k, v in times.items())
        if len(times) == 2:
            row += f"  speedup {times['python'] / times['cython']:.1f}x"
        print(f"{name:42s} {row}")


if __name__ == "__main__":
    main()
