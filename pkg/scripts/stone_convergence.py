"""Forward vs central difference quotients of the translation group.

Prints the error table and fitted log-log slopes for a random band-limited
function. Expect slopes near 1 (forward) and 2 (central) once t * n/4 is small.

    python3 scripts/stone_convergence.py --n 64 --seed 0
"""
import argparse

import numpy as np

from opfactor.discrete import PeriodicGrid, band_limited, stone_generator_check


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=64)
    ap.add_argument("--length", type=float, default=2 * np.pi)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    grid = PeriodicGrid(args.n, args.length)
    f = band_limited(grid, np.random.default_rng(args.seed))
    steps = np.logspace(-1, -5, 9)
    fwd = stone_generator_check(grid, f, steps)
    cen = stone_generator_check(grid, f, steps, scheme="central")

    print(f"{'t':>10} {'forward':>12} {'central':>12}")
    for t, a, b in zip(steps, fwd.errors, cen.errors):
        print(f"{t:10.1e} {a:12.3e} {b:12.3e}")
    # the two largest steps are outside the asymptotic range for central
    tail = stone_generator_check(grid, f, steps[2:6], scheme="central")
    print(f"slopes: forward {fwd.fitted_slope:.3f}, central {cen.fitted_slope:.3f} "
          f"(central on 1e-2..1e-3.5: {tail.fitted_slope:.3f})")


if __name__ == "__main__":
    main()
