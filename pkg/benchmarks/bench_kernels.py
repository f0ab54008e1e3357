"""Benchmark the aggregate-uncertainty kernels: numba lane vs pure numpy.

The greedy maximum-entropy extraction scans a 2^n belief table once per
round, so the two lanes diverge in cost as the frame grows toward the
cap.  Run with the package installed:

    python3 benchmarks/bench_kernels.py [--worlds 8 12 16] [--repeat 20]

Both lanes are imported directly, so the DSFLOW_NO_NUMBA flag does not
matter here; it only pins which lane the library itself dispatches to.
"""

import argparse
import random
import time

import numpy as np

from dsflow._kernels import (
    HAVE_NUMBA,
    bel_table_numpy,
    max_entropy_numpy,
)

if HAVE_NUMBA:
    from dsflow._kernels import _bel_table_nb, _max_entropy_nb


def random_body(n_worlds: int, n_focal: int, rng: random.Random):
    """Random focal bitmasks and masses over an n-world frame."""
    masks = rng.sample(range(1, 1 << n_worlds), n_focal)
    weights = [rng.randint(1, 100) for _ in range(n_focal)]
    total = sum(weights)
    return (
        np.array(masks, dtype=np.int64),
        np.array([w / total for w in weights], dtype=np.float64),
    )


def time_lane(fn_bel, fn_au, bodies, n, repeat):
    start = time.perf_counter()
    result = 0.0
    for _ in range(repeat):
        for masks, weights in bodies:
            result += fn_au(fn_bel(masks, weights, n), n)
    return time.perf_counter() - start, result


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--worlds", type=int, nargs="+", default=[8, 12, 16])
    parser.add_argument("--bodies", type=int, default=32)
    parser.add_argument("--repeat", type=int, default=20)
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()

    rng = random.Random(args.seed)
    print(f"{'worlds':>8} {'numpy':>12} {'numba':>12} {'speedup':>9}")
    for n in args.worlds:
        n_focal = min(args.bodies, (1 << n) - 1)
        bodies = [random_body(n, n_focal, rng) for _ in range(8)]
        if HAVE_NUMBA:
            # First call compiles; keep it out of the timing.
            _max_entropy_nb(_bel_table_nb(*bodies[0], np.int64(n)), np.int64(n))
        t_np, r_np = time_lane(bel_table_numpy, max_entropy_numpy, bodies, n, args.repeat)
        if HAVE_NUMBA:
            t_nb, r_nb = time_lane(
                lambda m, w, k: _bel_table_nb(m, w, np.int64(k)),
                lambda b, k: float(_max_entropy_nb(b, np.int64(k))),
                bodies,
                n,
                args.repeat,
            )
            assert abs(r_np - r_nb) < 1e-9, "lanes disagree"
            print(f"{n:>8} {t_np:>11.4f}s {t_nb:>11.4f}s {t_np / t_nb:>8.1f}x")
        else:
            print(f"{n:>8} {t_np:>11.4f}s {'n/a':>12} {'n/a':>9}")


if __name__ == "__main__":
    main()
