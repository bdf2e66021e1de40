"""dim N(A^2) against dim N(A) along a path from a normal to a nilpotent matrix.

A(s) is the n x n shift J with s placed in the bottom-left corner. At s = 1
it is a cyclic permutation, hence normal and invertible; for 0 < s the matrix
stays invertible, and at s = 0 it is nilpotent, where N(A^2) is strictly
larger than N(A). Corners below the rank tolerance (rtol 1e-9) already read
as nilpotent.

    python3 scripts/nilpotent_vs_normal.py --n 4
"""
import argparse

import numpy as np

from opfactor.factorsolve import null_product_decompose


def family(n: int, s: float) -> np.ndarray:
    A = np.diag(np.ones(n - 1), 1).astype(complex)
    A[-1, 0] = s
    return A


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=4)
    args = ap.parse_args()

    print(f"{'s':>8} {'dim N(A)':>9} {'dim N(A^2)':>11} {'equality':>9}")
    for s in [1.0, 0.5, 1e-2, 1e-6, 1e-12, 0.0]:
        A = family(args.n, s)
        nd = null_product_decompose(A, A)
        print(f"{s:8.0e} {nd.n_A.dim:9d} {nd.n_AB.dim:11d} {str(nd.equality_holds):>9}")


if __name__ == "__main__":
    main()
