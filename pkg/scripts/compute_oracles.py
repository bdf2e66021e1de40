"""Regenerate tests/oracles.json from independent reference implementations.

Nothing here imports opfactor. Singular values and eigenvalues come from
LAPACK (numpy.linalg), transforms from numpy.fft, polynomial roots from
mpmath at 50 digits, and the subspace angle from a brute-force scan over
unit-circle parametrisations.

    python3 scripts/compute_oracles.py > tests/oracles.json
"""
import json

import mpmath
import numpy as np


def cmat(M):
    M = np.asarray(M, dtype=complex)
    return {"rows": M.shape[0], "cols": M.shape[1], "data": [[z.real, z.imag] for z in M.ravel()]}


def brute_force_angle(u, w, grid=20001):
    # unit vectors of two complex lines are e^{ia} u and e^{ib} w; only the
    # phase difference matters, so scan it and polish by golden section
    def dist(phi):
        return float(np.linalg.norm(u - np.exp(1j * phi) * w))

    phis = np.linspace(0, 2 * np.pi, grid)
    k = int(np.argmin([dist(p) for p in phis]))
    lo, hi = phis[max(k - 1, 0)], phis[min(k + 1, grid - 1)]
    g = (np.sqrt(5) - 1) / 2
    for _ in range(200):
        a, b = hi - g * (hi - lo), lo + g * (hi - lo)
        if dist(a) < dist(b):
            hi = b
        else:
            lo = a
    return dist((lo + hi) / 2)


def main():
    rng = np.random.default_rng(20240601)
    M = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    W = rng.normal(size=(5, 3)) + 1j * rng.normal(size=(5, 3))
    X = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    H = (X + X.conj().T) / 2
    v = rng.normal(size=16) + 1j * rng.normal(size=16)

    mpmath.mp.dps = 50
    quintic = [-1, -1, 0, 0, 0, 1]  # z^5 - z - 1, ascending
    r = mpmath.polyroots(quintic[::-1], maxsteps=200, extraprec=200)
    quintic_roots = sorted(((float(z.real), float(z.imag)) for z in r))

    e1 = np.array([1, 0], dtype=complex)
    d = np.array([1, 1], dtype=complex) / np.sqrt(2)

    out = {
        "svd_4x4": {"M": cmat(M), "sigma": np.linalg.svd(M, compute_uv=False).tolist()},
        "svd_5x3": {"M": cmat(W), "sigma": np.linalg.svd(W, compute_uv=False).tolist()},
        "eig_6x6": {"H": cmat(H), "eigenvalues": np.linalg.eigvalsh(H).tolist()},
        "fft_16": {"v": cmat(v[:, None]),
                   "fft": [[z.real, z.imag] for z in np.fft.fft(v)]},
        "quintic": {"coeffs": quintic, "roots": quintic_roots},
        "angle_line_diagonal": brute_force_angle(e1, d),
    }
    print(json.dumps(out, indent=1))


if __name__ == "__main__":
    main()
