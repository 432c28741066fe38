"""Time the numba kernels against their numpy fallbacks.

    python benchmarks/bench_kernels.py [--repeat N]
"""
from __future__ import annotations

import argparse
import timeit

import numpy as np

from bnstab import kernels
from bnstab.closure import DEGENERATION_RULES, FULL_RULES, compute_closure, default_grid


def bench(label: str, numba_fn, numpy_fn, repeat: int) -> None:
    a, b = numba_fn(), numpy_fn()  # warm-up, also compiles the jitted path
    same = all(np.array_equal(x, y) for x, y in zip(a, b)) if isinstance(a, tuple) else np.array_equal(a, b)
    t_nb = min(timeit.repeat(numba_fn, number=1, repeat=repeat))
    t_np = min(timeit.repeat(numpy_fn, number=1, repeat=repeat))
    print(f"{label:<28} numba {t_nb * 1e3:9.2f} ms   numpy {t_np * 1e3:9.2f} ms   ratio {t_np / t_nb:7.1f}x   equal={same}")


def main(argv=None) -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args(argv)
    if not kernels.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")
    print(f"default backend: {kernels.BACKEND}")
    r = 4
    bench("split scan r=2001", lambda: kernels.split_exists_numba(2001, 8 * 2001), lambda: kernels.split_exists_numpy(2001, 8 * 2001), args.repeat)
    bench("elliptic tables r=4 j<=160", lambda: kernels.elliptic_tables_numba(r, 160), lambda: kernels.elliptic_tables_numpy(r, 160), args.repeat)
    bench("elliptic tables r=8 j<=96", lambda: kernels.elliptic_tables_numba(8, 96), lambda: kernels.elliptic_tables_numpy(8, 96), args.repeat)
    grid = default_grid(r)
    for name, rules in (("full", FULL_RULES), ("degeneration", DEGENERATION_RULES)):
        bench(
            f"closure r=4 {name}",
            lambda: compute_closure(grid, rules, backend="numba").levels,
            lambda: compute_closure(grid, rules, backend="numpy").levels,
            args.repeat,
        )


if __name__ == "__main__":
    main()
